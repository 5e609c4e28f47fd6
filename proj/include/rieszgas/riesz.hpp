#pragma once
// riesz.hpp - Riesz potential, domains, point configurations, bare energies

#include <memory>
#include <vector>

#include "rieszgas/lattice.hpp"

namespace rieszgas {

enum class Branch { shortRange, longRangePositive, logCase, negative };

// exponent s with its spatial dimension; admissible range s > -2
struct RieszExponent {
    double s;
    int d;

    RieszExponent(double s_, int d_);
    Branch branch() const;
};

// V_s(r) = r^{-s} (s>0), -log r (s=0), -r^{|s|} (-2<s<0); r > 0 required.
double potential_value(const RieszExponent& exp, double r);
double potential_value(double s, double r);
// dV/dr; strictly negative for every admissible s (repulsivity)
double potential_derivative(double s, double r);

struct Domain {
    enum class Kind { interval, box, ball, periodicCell };

    Kind kind = Kind::interval;
    int d = 1;
    // interval/box: corners lo..hi; ball: center + radius
    double lo[3] = {0, 0, 0};
    double hi[3] = {0, 0, 0};
    double center[3] = {0, 0, 0};
    double radius = 0.0;
    // periodicCell: scaled lattice ell*L
    std::shared_ptr<const Lattice> lattice;
    double ell = 1.0;

    static Domain interval(double a, double b);
    static Domain box(int d, const double* lo, const double* hi);
    static Domain ball(int d, const double* center, double radius);
    static Domain periodic_cell(std::shared_ptr<const Lattice> lat, double ell);

    double volume() const;
    bool contains(const double* x, double pad = 1e-12) const;
    // project x onto the closed domain (no-op for periodic cells)
    void project(double* x) const;
};

struct PointConfiguration {
    std::vector<double> coords;  // n * d, row-major points
    Domain domain;

    int size() const { return domain.d == 0 ? 0 : static_cast<int>(coords.size()) / domain.d; }
    const double* point(int i) const { return coords.data() + i * domain.d; }

    // validates membership + pairwise distinctness; periodic coordinates are
    // reduced to the fundamental cell
    static PointConfiguration create(std::vector<double> coords, Domain domain);

    double min_pair_distance() const;
};

// sum over pairs of V_s(x_j - x_k); 0 for fewer than two points
double riesz_energy(const PointConfiguration& config, const RieszExponent& exp);
double riesz_energy(int d, int n, const double* coords, double s);

// multiplies all coordinates and the domain geometry by lambda > 0
PointConfiguration scale_configuration(const PointConfiguration& config, double lambda);

}  // namespace rieszgas
