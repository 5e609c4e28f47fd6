#include "rieszgas/lattice.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "rieszgas/errors.hpp"
#include "rieszgas/specialfn.hpp"

namespace rieszgas {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286060651209;

void invert_small(int d, const double* m, double* inv) {
    if (d == 1) {
        inv[0] = 1.0 / m[0];
        return;
    }
    if (d == 2) {
        double det = m[0] * m[3] - m[1] * m[2];
        inv[0] = m[3] / det;
        inv[1] = -m[1] / det;
        inv[2] = -m[2] / det;
        inv[3] = m[0] / det;
        return;
    }
    // column-major 3x3
    double a = m[0], b = m[3], c = m[6];
    double d1 = m[1], e = m[4], f = m[7];
    double g = m[2], h = m[5], i = m[8];
    double A = e * i - f * h, B = c * h - b * i, C = b * f - c * e;
    double D = f * g - d1 * i, E = a * i - c * g, F = c * d1 - a * f;
    double G = d1 * h - e * g, H = b * g - a * h, I = a * e - b * d1;
    double det = a * A + b * D + c * G;
    inv[0] = A / det; inv[3] = B / det; inv[6] = C / det;
    inv[1] = D / det; inv[4] = E / det; inv[7] = F / det;
    inv[2] = G / det; inv[5] = H / det; inv[8] = I / det;
}

double det_small(int d, const double* m) {
    if (d == 1) return m[0];
    if (d == 2) return m[0] * m[3] - m[1] * m[2];
    return m[0] * (m[4] * m[8] - m[7] * m[5]) -
           m[3] * (m[1] * m[8] - m[7] * m[2]) +
           m[6] * (m[1] * m[5] - m[4] * m[2]);
}

// iterate integer points with max-norm exactly m (m >= 1)
template <typename F>
void for_shell(int d, int m, F&& fn) {
    int n[3] = {0, 0, 0};
    if (d == 1) {
        n[0] = m; fn(n);
        n[0] = -m; fn(n);
        return;
    }
    if (d == 2) {
        for (n[0] = -m; n[0] <= m; ++n[0])
            for (n[1] = -m; n[1] <= m; ++n[1])
                if (std::max(std::abs(n[0]), std::abs(n[1])) == m) fn(n);
        return;
    }
    for (n[0] = -m; n[0] <= m; ++n[0])
        for (n[1] = -m; n[1] <= m; ++n[1])
            for (n[2] = -m; n[2] <= m; ++n[2])
                if (std::max(std::abs(n[0]), std::max(std::abs(n[1]), std::abs(n[2]))) == m)
                    fn(n);
}

struct UnitLattice {
    int d;
    std::array<double, 9> basis;  // unit covolume
    std::array<double, 9> dual;
    double lambda;  // original = lambda * unit
};

UnitLattice normalize(const Lattice& lat) {
    UnitLattice u;
    u.d = lat.dim();
    u.lambda = std::pow(lat.covolume(), 1.0 / lat.dim());
    for (int i = 0; i < u.d * u.d; ++i) {
        u.basis[i] = lat.basis()[i] / u.lambda;
        u.dual[i] = lat.dual_basis()[i] * u.lambda;
    }
    return u;
}

std::array<double, 3> mat_vec(int d, const double* m, const double* v) {
    std::array<double, 3> r{0.0, 0.0, 0.0};
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) r[i] += m[i + d * j] * v[j];
    return r;
}

std::array<double, 3> mat_intvec(int d, const double* m, const int* n) {
    std::array<double, 3> r{0.0, 0.0, 0.0};
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) r[i] += m[i + d * j] * n[j];
    return r;
}

// Sum f over nonzero vectors of the (column-major) basis, growing max-norm
// shells until a full shell contributes less than tol in absolute value.
template <typename F>
double shell_sum(int d, const double* basis, double tol, int max_shell, F&& term) {
    double total = 0.0;
    for (int m = 1; m <= max_shell; ++m) {
        double shell = 0.0;
        for_shell(d, m, [&](const int* n) {
            auto v = mat_intvec(d, basis, n);
            double q = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            shell += term(v, q);
        });
        total += shell;
        if (m >= 2 && std::fabs(shell) < tol) return total;
    }
    throw convergence_error("lattice shell sum did not converge within max_shell");
}

void check_not_pole(double s, int d) {
    if (std::fabs(s - d) < 1e-6) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "epstein zeta has a pole at s = d = %d (residue of 2*zeta there is "
                      "|S^{d-1}|/|Q| = %.12g)",
                      d, 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d));
        throw pole_error(buf);
    }
}

// incomplete-gamma bracket for 2*zeta at unit covolume:
//   pi^{-s/2} Gamma(s/2) * 2 zeta(s) = -2 a^{s/2}/s - 2 a^{(s-d)/2}/(d-s)
//     + sum'_z (pi |z|^2)^{-s/2} Gamma(s/2, pi |z|^2 a)
//     + sum'_k (pi |k|^2)^{-(d-s)/2} Gamma((d-s)/2, pi |k|^2 / a)
double zeta2_unit(const UnitLattice& u, double s, const EwaldSettings& ew) {
    double a = ew.alpha;
    double tol = ew.tolerance / 10.0;
    double sr = shell_sum(u.d, u.basis.data(), tol, ew.max_shell,
                          [&](const std::array<double, 3>&, double q) {
                              return std::pow(kPi * q, -0.5 * s) *
                                     upper_gamma(0.5 * s, kPi * q * a);
                          });
    double sk = shell_sum(u.d, u.dual.data(), tol, ew.max_shell,
                          [&](const std::array<double, 3>&, double q) {
                              return std::pow(kPi * q, -0.5 * (u.d - s)) *
                                     upper_gamma(0.5 * (u.d - s), kPi * q / a);
                          });
    double bracket = -2.0 * std::pow(a, 0.5 * s) / s -
                     2.0 * std::pow(a, 0.5 * (s - u.d)) / (u.d - s) + sr + sk;
    return std::pow(kPi, 0.5 * s) * bracket / std::tgamma(0.5 * s);
}

// C(0) entering 2 zeta'(0) = (C(0) - log a - gamma - log pi)/2 at unit covolume
double zeta_deriv0_unit(const UnitLattice& u, const EwaldSettings& ew) {
    double a = ew.alpha;
    double tol = ew.tolerance / 10.0;
    double sr = shell_sum(u.d, u.basis.data(), tol, ew.max_shell,
                          [&](const std::array<double, 3>&, double q) {
                              return exp_integral_e1(kPi * q * a);
                          });
    double sk = shell_sum(u.d, u.dual.data(), tol, ew.max_shell,
                          [&](const std::array<double, 3>&, double q) {
                              return std::pow(kPi * q, -0.5 * u.d) *
                                     upper_gamma(0.5 * u.d, kPi * q / a);
                          });
    double c0 = -2.0 * std::pow(a, -0.5 * u.d) / u.d + sr + sk;
    return 0.25 * (c0 - std::log(a) - kEulerGamma - std::log(kPi));
}

// x-offset bracket: pi^{-s/2} Gamma(s/2) Vtilde_s(x) at unit covolume.
// The s = 0 derivative branch is (bracket at s=0)/2.
double potential_bracket_unit(const UnitLattice& u, double s, const double* x,
                              const EwaldSettings& ew, bool deriv0) {
    double a = ew.alpha;
    double tol = ew.tolerance / 10.0;

    // real-space part: all z, offset by x (origin shell m=0 included by hand)
    auto real_term = [&](double q) {
        if (deriv0) return exp_integral_e1(kPi * q * a);
        return std::pow(kPi * q, -0.5 * s) * upper_gamma(0.5 * s, kPi * q * a);
    };
    double q0 = 0.0;
    for (int i = 0; i < u.d; ++i) q0 += x[i] * x[i];
    if (q0 < 1e-20)
        throw std::domain_error("periodic potential singular: x lies on the lattice");
    double sr = real_term(q0);
    sr += shell_sum(u.d, u.basis.data(), tol, ew.max_shell,
                    [&](const std::array<double, 3>& z, double) {
                        double q = 0.0;
                        for (int i = 0; i < u.d; ++i) {
                            double di = x[i] - z[i];
                            q += di * di;
                        }
                        if (q < 1e-20)
                            throw std::domain_error(
                                "periodic potential singular: x lies on the lattice");
                        return real_term(q);
                    });

    double sk = shell_sum(u.d, u.dual.data(), tol, ew.max_shell,
                          [&](const std::array<double, 3>& k, double q) {
                              double phase = 0.0;
                              for (int i = 0; i < u.d; ++i) phase += k[i] * x[i];
                              double g = deriv0
                                             ? std::pow(kPi * q, -0.5 * u.d) *
                                                   upper_gamma(0.5 * u.d, kPi * q / a)
                                             : std::pow(kPi * q, -0.5 * (u.d - s)) *
                                                   upper_gamma(0.5 * (u.d - s), kPi * q / a);
                              return std::cos(2.0 * kPi * phase) * g;
                          });

    double pole = deriv0 ? -2.0 * std::pow(a, -0.5 * u.d) / u.d
                         : -2.0 * std::pow(a, 0.5 * (s - u.d)) / (u.d - s);
    return pole + sr + sk;
}

}  // namespace

Lattice Lattice::from_basis(int d, const double* columns) {
    if (d < 1 || d > 3) throw std::invalid_argument("lattice dimension must be 1, 2 or 3");
    Lattice lat;
    lat.d_ = d;
    for (int i = 0; i < d * d; ++i) lat.basis_[i] = columns[i];
    double det = det_small(d, columns);
    if (std::fabs(det) < 1e-14)
        throw std::invalid_argument("lattice basis is singular");
    lat.covolume_ = std::fabs(det);
    double inv[9];
    invert_small(d, columns, inv);
    // dual = B^{-T}: transpose the (column-major) inverse
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) lat.dual_[i + d * j] = inv[j + d * i];
    return lat;
}

Lattice Lattice::from_name(const std::string& name, double density) {
    if (!(density > 0.0)) throw std::invalid_argument("lattice density must be positive");
    double b[9];
    int d = 0;
    if (name == "integers") {
        d = 1;
        b[0] = 1.0;
    } else if (name == "square") {
        d = 2;
        b[0] = 1; b[1] = 0; b[2] = 0; b[3] = 1;
    } else if (name == "triangular") {
        d = 2;
        b[0] = 1; b[1] = 0;
        b[2] = 0.5; b[3] = std::sqrt(3.0) / 2.0;
    } else if (name == "cubic") {
        d = 3;
        for (int i = 0; i < 9; ++i) b[i] = (i % 4 == 0) ? 1.0 : 0.0;
    } else if (name == "bcc") {
        d = 3;
        double h = 0.5;
        b[0] = -h; b[1] = h; b[2] = h;
        b[3] = h; b[4] = -h; b[5] = h;
        b[6] = h; b[7] = h; b[8] = -h;
    } else if (name == "fcc") {
        d = 3;
        double h = 0.5;
        b[0] = 0; b[1] = h; b[2] = h;
        b[3] = h; b[4] = 0; b[5] = h;
        b[6] = h; b[7] = h; b[8] = 0;
    } else {
        throw std::invalid_argument("unknown lattice name: " + name);
    }
    double det = std::fabs(det_small(d, b));
    double scale = std::pow(1.0 / (density * det), 1.0 / d);
    for (int i = 0; i < d * d; ++i) b[i] *= scale;
    return from_basis(d, b);
}

std::array<double, 3> Lattice::vector(const int* n) const { return mat_intvec(d_, basis_.data(), n); }

std::array<double, 3> Lattice::dual_vector(const int* n) const {
    return mat_intvec(d_, dual_.data(), n);
}

double Lattice::min_vector_norm() const {
    double best = 1e300;
    double max_col = 0.0;
    for (int j = 0; j < d_; ++j) {
        double c = 0.0;
        for (int i = 0; i < d_; ++i) c += basis_[i + d_ * j] * basis_[i + d_ * j];
        max_col = std::max(max_col, std::sqrt(c));
    }
    double sigma_min = covolume_ / std::pow(std::sqrt(double(d_)) * max_col, d_ - 1);
    for (int m = 1; m <= 40; ++m) {
        for_shell(d_, m, [&](const int* n) {
            auto v = mat_intvec(d_, basis_.data(), n);
            double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
            best = std::min(best, r);
        });
        if (m * sigma_min > best) break;
    }
    return best;
}

void Lattice::reduce(double* x) const {
    double f[3] = {0, 0, 0};
    // fractional coordinates: f = B^{-1} x = dual^T x
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) f[i] += dual_[j + d_ * i] * x[j];
    for (int i = 0; i < d_; ++i) f[i] -= std::floor(f[i]);
    auto r = mat_vec(d_, basis_.data(), f);
    for (int i = 0; i < d_; ++i) x[i] = r[i];
}

double Lattice::min_image_distance(const double* x, const double* y) const {
    double delta[3] = {0, 0, 0};
    for (int i = 0; i < d_; ++i) delta[i] = x[i] - y[i];
    double f[3] = {0, 0, 0};
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) f[i] += dual_[j + d_ * i] * delta[j];
    for (int i = 0; i < d_; ++i) f[i] -= std::round(f[i]);
    double best = 1e300;
    int n[3] = {0, 0, 0};
    auto visit = [&](const int* nn) {
        double g[3];
        for (int i = 0; i < d_; ++i) g[i] = f[i] + nn[i];
        auto v = mat_vec(d_, basis_.data(), g);
        double q = 0.0;
        for (int i = 0; i < d_; ++i) q += v[i] * v[i];
        best = std::min(best, std::sqrt(q));
    };
    visit(n);
    for (int m = 1; m <= 1; ++m) for_shell(d_, m, visit);
    return best;
}

std::string Lattice::serialize() const {
    std::ostringstream os;
    os.precision(17);
    os << "dimension " << d_ << "\n";
    for (int j = 0; j < d_; ++j) {
        os << "basis";
        for (int i = 0; i < d_; ++i) os << " " << basis_[i + d_ * j];
        os << "\n";
    }
    os << "density " << 1.0 / covolume_ << "\n";
    return os.str();
}

Lattice Lattice::parse(const std::string& text) {
    std::istringstream is(text);
    std::string key;
    int d = 0;
    double cols[9];
    int seen = 0;
    double density = -1.0;
    while (is >> key) {
        if (key == "dimension") {
            is >> d;
            if (d < 1 || d > 3) throw std::invalid_argument("lattice parse: bad dimension");
        } else if (key == "basis") {
            if (d == 0) throw std::invalid_argument("lattice parse: basis before dimension");
            if (seen >= d) throw std::invalid_argument("lattice parse: too many basis rows");
            for (int i = 0; i < d; ++i)
                if (!(is >> cols[i + d * seen]))
                    throw std::invalid_argument("lattice parse: short basis row");
            ++seen;
        } else if (key == "density") {
            is >> density;
        } else {
            throw std::invalid_argument("lattice parse: unknown key " + key);
        }
    }
    if (d == 0 || seen != d) throw std::invalid_argument("lattice parse: incomplete basis");
    Lattice lat = from_basis(d, cols);
    if (density > 0.0 && std::fabs(1.0 / lat.covolume() - density) > 1e-6 * density)
        throw std::invalid_argument("lattice parse: density inconsistent with basis");
    return lat;
}

double epstein_zeta(const Lattice& lat, double s, const EwaldSettings& ew) {
    if (s == 0.0) return -0.5;  // continuation value, lattice independent
    check_not_pole(s, lat.dim());
    UnitLattice u = normalize(lat);
    double z2 = zeta2_unit(u, s, ew);
    return 0.5 * std::pow(u.lambda, -s) * z2;
}

double epstein_zeta_deriv0(const Lattice& lat, const EwaldSettings& ew) {
    UnitLattice u = normalize(lat);
    return zeta_deriv0_unit(u, ew) + 0.5 * std::log(u.lambda);
}

double epstein_zeta_pole_residue(const Lattice& lat) {
    int d = lat.dim();
    return 2.0 * std::pow(kPi, 0.5 * d) / (std::tgamma(0.5 * d) * lat.covolume());
}

double epstein_zeta_difference(const Lattice& a, const Lattice& b, double s,
                               const EwaldSettings& ew) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("zeta difference requires equal dimensions");
    if (std::fabs(a.covolume() - b.covolume()) > 1e-12 * a.covolume())
        throw std::invalid_argument("zeta difference requires equal covolumes");
    if (s == 0.0) return 0.0;
    UnitLattice ua = normalize(a), ub = normalize(b);
    int d = a.dim();
    double aa = ew.alpha;
    double tol = ew.tolerance / 10.0;
    auto sums = [&](const UnitLattice& u) {
        double sr = shell_sum(d, u.basis.data(), tol, ew.max_shell,
                              [&](const std::array<double, 3>&, double q) {
                                  return std::pow(kPi * q, -0.5 * s) *
                                         upper_gamma(0.5 * s, kPi * q * aa);
                              });
        double sk = shell_sum(d, u.dual.data(), tol, ew.max_shell,
                              [&](const std::array<double, 3>&, double q) {
                                  return std::pow(kPi * q, -0.5 * (d - s)) *
                                         upper_gamma(0.5 * (d - s), kPi * q / aa);
                              });
        return sr + sk;
    };
    double bracket = sums(ua) - sums(ub);
    return 0.5 * std::pow(ua.lambda, -s) * std::pow(kPi, 0.5 * s) * bracket /
           std::tgamma(0.5 * s);
}

double madelung(const Lattice& lat, double s, const EwaldSettings& ew) {
    if (s == 0.0) return 2.0 * epstein_zeta_deriv0(lat, ew);
    check_not_pole(s, lat.dim());
    double z = epstein_zeta(lat, s, ew);
    return s > 0.0 ? 2.0 * z : -2.0 * z;
}

double periodic_potential(const Lattice& lat, double s, const double* x,
                          const EwaldSettings& ew) {
    UnitLattice u = normalize(lat);
    double xr[3] = {0, 0, 0};
    for (int i = 0; i < u.d; ++i) xr[i] = x[i];
    lat.reduce(xr);
    for (int i = 0; i < u.d; ++i) xr[i] /= u.lambda;
    if (s == 0.0) {
        double b = potential_bracket_unit(u, 0.0, xr, ew, true);
        return 0.5 * b;  // scale-invariant at s = 0
    }
    check_not_pole(s, lat.dim());
    double b = potential_bracket_unit(u, s, xr, ew, false);
    double v = std::pow(kPi, 0.5 * s) * b / std::tgamma(0.5 * s);
    v *= std::pow(u.lambda, -s);
    return s > 0.0 ? v : -v;
}

std::array<double, 3> periodic_potential_gradient(const Lattice& lat, double s,
                                                  const double* x,
                                                  const EwaldSettings& ew) {
    UnitLattice u = normalize(lat);
    double xr[3] = {0, 0, 0};
    for (int i = 0; i < u.d; ++i) xr[i] = x[i];
    lat.reduce(xr);
    for (int i = 0; i < u.d; ++i) xr[i] /= u.lambda;

    double a = ew.alpha;
    double tol = ew.tolerance / 10.0;
    bool deriv0 = (s == 0.0);
    if (!deriv0) check_not_pole(s, lat.dim());

    std::array<double, 3> grad{0, 0, 0};
    // real part: sum over z of 2 (x - z) f'(|x - z|^2) with
    // f'(q) = -q^{-1} [ (s/2)(pi q)^{-s/2} Gamma(s/2, pi q a) + a^{s/2} e^{-pi q a} ];
    // at s = 0 the first term carries the factor that cancels with 1/Gamma(s/2).
    auto add_real = [&](const double* diff) {
        double q = 0.0;
        for (int i = 0; i < u.d; ++i) q += diff[i] * diff[i];
        if (q < 1e-20)
            throw std::domain_error("periodic potential singular: x lies on the lattice");
        double fp;
        if (deriv0) {
            fp = -std::exp(-kPi * q * a) / q;
        } else {
            fp = -((0.5 * s) * std::pow(kPi * q, -0.5 * s) * upper_gamma(0.5 * s, kPi * q * a) +
                   std::pow(a, 0.5 * s) * std::exp(-kPi * q * a)) / q;
        }
        double m = 0.0;
        for (int i = 0; i < u.d; ++i) m = std::max(m, std::fabs(2.0 * diff[i] * fp));
        for (int i = 0; i < u.d; ++i) grad[i] += 2.0 * diff[i] * fp;
        return m;
    };
    double d0[3] = {xr[0], xr[1], xr[2]};
    add_real(d0);
    for (int m = 1; m <= ew.max_shell; ++m) {
        double shell = 0.0;
        for_shell(u.d, m, [&](const int* n) {
            auto z = mat_intvec(u.d, u.basis.data(), n);
            double diff[3] = {0, 0, 0};
            for (int i = 0; i < u.d; ++i) diff[i] = xr[i] - z[i];
            shell = std::max(shell, add_real(diff));
        });
        if (m >= 2 && shell < tol) break;
    }
    // dual part: -2 pi k sin(2 pi k.x) g(|k|^2)
    for (int m = 1; m <= ew.max_shell; ++m) {
        double shell = 0.0;
        for_shell(u.d, m, [&](const int* n) {
            auto k = mat_intvec(u.d, u.dual.data(), n);
            double q = 0.0, phase = 0.0;
            for (int i = 0; i < u.d; ++i) {
                q += k[i] * k[i];
                phase += k[i] * xr[i];
            }
            double g = deriv0 ? std::pow(kPi * q, -0.5 * u.d) * upper_gamma(0.5 * u.d, kPi * q / a)
                              : std::pow(kPi * q, -0.5 * (u.d - s)) *
                                    upper_gamma(0.5 * (u.d - s), kPi * q / a);
            double f = -2.0 * kPi * std::sin(2.0 * kPi * phase) * g;
            for (int i = 0; i < u.d; ++i) {
                grad[i] += k[i] * f;
                shell = std::max(shell, std::fabs(k[i] * f));
            }
        });
        if (m >= 2 && shell < tol) break;
    }

    double pref = deriv0 ? 0.5 : std::pow(kPi, 0.5 * s) / std::tgamma(0.5 * s);
    double sign = (s < 0.0) ? -1.0 : 1.0;
    // chain rule for the internal rescaling x -> x/lambda
    double scale = deriv0 ? 1.0 / u.lambda : std::pow(u.lambda, -s) / u.lambda;
    for (int i = 0; i < u.d; ++i) grad[i] *= sign * pref * scale;
    return grad;
}

double periodic_energy(const Lattice& lat, double ell, double s, int n,
                       const double* points, const EwaldSettings& ew) {
    if (!(ell > 0.0)) throw std::invalid_argument("periodic_energy: ell must be positive");
    if (n < 0) throw std::invalid_argument("periodic_energy: negative point count");
    int d = lat.dim();
    double b[9];
    for (int i = 0; i < d * d; ++i) b[i] = lat.basis()[i] * ell;
    Lattice scaled = Lattice::from_basis(d, b);
    double energy = n * madelung(scaled, s, ew) / 2.0;
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            double diff[3] = {0, 0, 0};
            for (int i = 0; i < d; ++i) diff[i] = points[j * d + i] - points[k * d + i];
            if (scaled.min_image_distance(points + j * d, points + k * d) < 1e-12)
                throw std::domain_error("periodic_energy: coincident points modulo the lattice");
            energy += periodic_potential(scaled, s, diff, ew);
        }
    }
    return energy;
}

void for_each_lattice_vector(const Lattice& lat, int max_shell,
                             const std::function<void(const std::array<double, 3>&, double)>& fn) {
    for (int m = 1; m <= max_shell; ++m) {
        for_shell(lat.dim(), m, [&](const int* n) {
            auto v = mat_intvec(lat.dim(), lat.basis(), n);
            double q = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            fn(v, q);
        });
    }
}

}  // namespace rieszgas
