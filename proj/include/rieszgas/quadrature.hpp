#pragma once
// quadrature.hpp - Gauss-Legendre rules

#include <vector>

namespace rieszgas {

struct GaussLegendre {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;  // sum to 2
};

// n-point rule on (-1,1), Newton iteration on P_n.
const GaussLegendre& gauss_legendre(int n);

// Nodes/weights mapped to (a,b).
void gauss_legendre_on(int n, double a, double b,
                       std::vector<double>& x, std::vector<double>& w);

}  // namespace rieszgas
