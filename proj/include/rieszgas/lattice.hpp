#pragma once
// lattice.hpp - lattices in d <= 3, Epstein zeta / Madelung / periodic potentials
// via theta-function (incomplete gamma) lattice sums.

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace rieszgas {

struct EwaldSettings {
    double alpha = 1.0;       // dimensionless splitting parameter
    double tolerance = 1e-12; // absolute target on the lattice sums
    int max_shell = 80;       // safety cap on shell growth
};

// Bravais lattice, basis vectors stored as columns of `basis`.
// `dual` is the integer-pairing dual (dual^T * basis = I); the Fourier-side
// lattice used in the literature is 2*pi times this one.
class Lattice {
  public:
    static Lattice from_basis(int d, const double* columns);
    // names: integers (d=1), square / triangular (d=2), cubic / bcc / fcc (d=3),
    // rescaled so that covolume = 1/density.
    static Lattice from_name(const std::string& name, double density);

    int dim() const { return d_; }
    double covolume() const { return covolume_; }
    const double* basis() const { return basis_.data(); }       // column-major d x d
    const double* dual_basis() const { return dual_.data(); }   // column-major d x d

    // B * n for integer coordinates n.
    std::array<double, 3> vector(const int* n) const;
    std::array<double, 3> dual_vector(const int* n) const;

    // Euclidean norm of the shortest nonzero lattice vector (brute force).
    double min_vector_norm() const;

    // reduce x to the fundamental cell B [0,1)^d
    void reduce(double* x) const;
    // minimum-image distance between two points
    double min_image_distance(const double* x, const double* y) const;

    // text block: dimension, basis rows (one generator per line), density
    std::string serialize() const;
    static Lattice parse(const std::string& text);

  private:
    int d_ = 0;
    std::array<double, 9> basis_{};
    std::array<double, 9> dual_{};
    double covolume_ = 0.0;
};

// Epstein zeta: meromorphic continuation of (1/2) sum_{z != 0} |z|^{-s}, s != d.
double epstein_zeta(const Lattice& lat, double s, const EwaldSettings& ew = {});

// d/ds zeta_L(s) at s = 0, from the differentiated continuation.
double epstein_zeta_deriv0(const Lattice& lat, const EwaldSettings& ew = {});

// residue of 2*zeta_L at the pole s = d: |S^{d-1}| / |Q|
double epstein_zeta_pole_residue(const Lattice& lat);

// zeta_A(s) - zeta_B(s) for two lattices of equal covolume. The pole terms
// cancel exactly, so the difference extends analytically through s = d; this
// is the quantity that makes lattice comparisons meaningful at s = d.
double epstein_zeta_difference(const Lattice& a, const Lattice& b, double s,
                               const EwaldSettings& ew = {});

// Madelung constant: 2 zeta(s) for s > 0, -2 zeta(s) for s < 0, 2 zeta'(0) at s = 0.
double madelung(const Lattice& lat, double s, const EwaldSettings& ew = {});

// Periodic potential V_s^L(x) with the sign conventions of the analytic
// continuation: the zero-cell-mean extension for 0 < s < d, the plain sum for
// s > d, minus the continuation for s < 0, and the s-derivative at s = 0.
double periodic_potential(const Lattice& lat, double s, const double* x,
                          const EwaldSettings& ew = {});

// gradient of periodic_potential w.r.t. x
std::array<double, 3> periodic_potential_gradient(const Lattice& lat, double s,
                                                  const double* x,
                                                  const EwaldSettings& ew = {});

// Periodic energy per cell of N points in the cell of ell*L:
//   sum_{j<k} V_s^{ell L}(x_j - x_k) + N * M_{ell L}(s) / 2.
double periodic_energy(const Lattice& lat, double ell, double s, int n,
                       const double* points, const EwaldSettings& ew = {});

// Enumerate nonzero lattice vectors by growing max-norm shells; the callback
// receives (vector, squared norm). Used by the direct-sum oracles and tests.
void for_each_lattice_vector(const Lattice& lat, int max_shell,
                             const std::function<void(const std::array<double, 3>&, double)>& fn);

}  // namespace rieszgas
