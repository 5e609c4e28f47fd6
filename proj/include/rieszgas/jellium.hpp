#pragma once
// jellium.hpp - background-renormalized (one-component plasma) energies,
// discrepancy diagnostics and the sharp-background truncation study.

#include <array>

#include "rieszgas/riesz.hpp"

namespace rieszgas {

struct QuadratureSettings {
    int nodes_per_axis = 64;   // >= 8
    int max_refinements = 6;   // adaptive doubling for nested integrals
    double rel_tolerance = 1e-9;
};

struct JelliumSystem {
    Domain domain;
    double rho_b;  // positive background density
    RieszExponent exp;

    JelliumSystem(Domain dom, double rho, RieszExponent e);
};

// int_Omega V_s(x - y) dy for x in the closed domain. Closed form on
// intervals; Duffy corner decomposition for boxes; radial caps for balls.
double background_potential(const JelliumSystem& sys, const double* x,
                            const QuadratureSettings& q = {});

// gradient of the background potential w.r.t. x (interior points)
std::array<double, 3> background_potential_gradient(const JelliumSystem& sys, const double* x,
                                                    const QuadratureSettings& q = {});

// (rho_b^2 / 2) int int_{Omega^2} V_s(x - y) dx dy
double background_self_energy(const JelliumSystem& sys, const QuadratureSettings& q = {});

// pair term - rho_b * sum_j background_potential(x_j) + background self-energy;
// neutrality |N - rho_b |Omega|| < 1e-9 is enforced for s <= 0
double jellium_energy(const JelliumSystem& sys, const PointConfiguration& config,
                      const QuadratureSettings& q = {});

// exact 1D Coulomb value on [-N/2, N/2] at rho_b = 1:
//   sum_j (x_(j) - j + (N+1)/2)^2 + N/12   over ascending x_(1) <= ... <= x_(N)
double jellium_energy_1d_coulomb(const PointConfiguration& config, int n);

// signed charge excess per unit ball volume:
//   (#X cap B_r(tau) - rho_b |B_r(tau) cap Omega|) / |B_r|
double discrepancy(const PointConfiguration& config, const double* tau, double r,
                   double rho_b, const Domain& domain);

// |B_r(tau) cap Omega| (closed form in 1D, recursive subdivision otherwise)
double ball_domain_overlap(const Domain& domain, const double* tau, double r);

struct ShiftCheck {
    double truncated;  // sum over |z| <= R of V_s(x-z) minus the cell backgrounds
    double predicted;  // V_s^L(x) + quadrupole shift (nonzero only at s = d-2)
};

// Truncated lattice-plus-background potential over the union of cells whose
// lattice points lie in B_R, against the analytic-continuation prediction.
ShiftCheck sharp_background_shift(const Lattice& lat, double s, const double* x, double R,
                                  const QuadratureSettings& q = {});

}  // namespace rieszgas
