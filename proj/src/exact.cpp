#include "rieszgas/exact.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "rieszgas/errors.hpp"
#include "rieszgas/quadrature.hpp"

namespace rieszgas {

namespace {

constexpr double kPi = 3.14159265358979323846;

// barycentric weights for interpolation on Gauss-Legendre nodes mapped to
// [lo, hi]: lambda_j proportional to (-1)^j sqrt((hi - x_j)(x_j - lo) w_j)
std::vector<double> barycentric_weights(const std::vector<double>& x,
                                        const std::vector<double>& w, double lo, double hi) {
    std::vector<double> lam(x.size());
    for (size_t j = 0; j < x.size(); ++j) {
        lam[j] = std::sqrt(std::max(0.0, (hi - x[j]) * (x[j] - lo) * w[j]));
        if (j % 2 == 1) lam[j] = -lam[j];
    }
    return lam;
}

struct PowerResult {
    double lambda;
    std::vector<double> vec;
};

PowerResult power_iteration(const std::vector<double>& A, int n, int max_iter, double tol) {
    std::vector<double> v(n, 1.0), av(n);
    double lambda = 0.0, prev = -1.0;
    for (int it = 0; it < max_iter; ++it) {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += A[i * n + j] * v[j];
            av[i] = s;
        }
        double num = 0.0, den = 0.0, norm = 0.0;
        for (int i = 0; i < n; ++i) {
            num += v[i] * av[i];
            den += v[i] * v[i];
            norm = std::max(norm, std::fabs(av[i]));
        }
        lambda = num / den;
        for (int i = 0; i < n; ++i) v[i] = av[i] / norm;
        if (it > 2 && std::fabs(lambda - prev) <= tol * std::fabs(lambda)) {
            PowerResult out;
            out.lambda = lambda;
            out.vec = v;
            return out;
        }
        prev = lambda;
    }
    throw convergence_error("transfer-operator power iteration did not converge");
}

}  // namespace

KunzSolution kunz_lambda1(double beta, const TransferOperatorGrid& grid) {
    if (!(beta > 0.0)) throw std::invalid_argument("kunz_lambda1 requires beta > 0");
    int n = grid.nodes;
    if (n < 64) throw std::invalid_argument("transfer-operator grid needs >= 64 nodes");
    double Y = grid.y_max > 0.0 ? grid.y_max : std::sqrt(2.0 * 16.0 * std::log(10.0) / beta);

    KunzSolution sol;
    sol.beta = beta;
    sol.y_max = Y;
    gauss_legendre_on(n, -Y, Y, sol.nodes, sol.weights);
    const auto& x = sol.nodes;
    auto lam = barycentric_weights(x, sol.weights, -Y, Y);

    auto gauss = [&](double y) { return std::exp(-0.5 * beta * y * y); };

    // Collocation: (K f)(y_i) = G(y_i) * int_{-Y}^{min(y_i+1, Y)} G(z) f(z) dz,
    // with f replaced by its polynomial interpolant on the grid. The row
    // integral of every cardinal function is evaluated exactly by a fresh
    // Gauss rule on the clipped range.
    int m = n + 24;
    std::vector<double> A(static_cast<size_t>(n) * n, 0.0);
    std::vector<double> zs, zw, card(n);
    for (int i = 0; i < n; ++i) {
        double top = std::min(x[i] + 1.0, Y);
        if (top <= -Y) continue;  // empty row (never happens for y > -Y-1)
        gauss_legendre_on(m, -Y, top, zs, zw);
        for (int q = 0; q < m; ++q) {
            double z = zs[q];
            // all cardinal functions at z in O(n) via the barycentric formula
            double denom = 0.0;
            int hit = -1;
            for (int j = 0; j < n; ++j) {
                double diff = z - x[j];
                if (std::fabs(diff) < 1e-14) {
                    hit = j;
                    break;
                }
                card[j] = lam[j] / diff;
                denom += card[j];
            }
            double wgt = zw[q] * gauss(z);
            if (hit >= 0) {
                A[i * static_cast<size_t>(n) + hit] += wgt;
            } else {
                for (int j = 0; j < n; ++j)
                    A[i * static_cast<size_t>(n) + j] += wgt * card[j] / denom;
            }
        }
        double gi = gauss(x[i]);
        for (int j = 0; j < n; ++j) A[i * static_cast<size_t>(n) + j] *= gi;
    }

    auto right = power_iteration(A, n, 100000, 1e-13);
    // transposed operator for the left eigenvalue diagnostic
    std::vector<double> At(A.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) At[j * static_cast<size_t>(n) + i] = A[i * static_cast<size_t>(n) + j];
    auto left = power_iteration(At, n, 100000, 1e-13);

    sol.lambda1 = right.lambda;
    sol.lambda1_left = left.lambda;
    sol.psi = right.vec;
    // enforce sign and L^2 normalization
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) norm2 += sol.weights[i] * sol.psi[i] * sol.psi[i];
    double scale = 1.0 / std::sqrt(norm2);
    double mass = 0.0;
    for (int i = 0; i < n; ++i) mass += sol.weights[i] * sol.psi[i];
    if (mass < 0.0) scale = -scale;
    for (int i = 0; i < n; ++i) sol.psi[i] *= scale;
    return sol;
}

double kunz_free_energy(double beta) {
    auto sol = kunz_lambda1(beta);
    return 1.0 / 12.0 - std::log(sol.lambda1) / beta;
}

double kunz_density(const KunzSolution& sol, double x, double tau) {
    double u = x + tau;
    int n = static_cast<int>(sol.nodes.size());
    auto lam = barycentric_weights(sol.nodes, sol.weights, -sol.y_max, sol.y_max);
    // note: the barycentric weights above are for the reference interval; the
    // affine map to [-Y, Y] only rescales them uniformly, which cancels.
    auto psi_at = [&](double y) {
        if (y <= -sol.y_max || y >= sol.y_max) return 0.0;
        double num = 0.0, den = 0.0;
        for (int j = 0; j < n; ++j) {
            double diff = y - sol.nodes[j];
            if (std::fabs(diff) < 1e-14) return sol.psi[j];
            double c = lam[j] / diff;
            num += c * sol.psi[j];
            den += c;
        }
        return num / den;
    };
    // normalization <psi, J psi>
    double norm = 0.0;
    for (int i = 0; i < n; ++i)
        norm += sol.weights[i] * sol.psi[i] * psi_at(-sol.nodes[i]);
    int kmin = static_cast<int>(std::floor(-sol.y_max - u)) - 1;
    int kmax = static_cast<int>(std::ceil(sol.y_max - u)) + 1;
    double total = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        double a = psi_at(u + k);
        if (a == 0.0) continue;
        total += a * psi_at(-(u + k));
    }
    return total / norm;
}

double selberg_log_partition(int n, double beta) {
    if (n < 1) throw std::invalid_argument("selberg_log_partition requires n >= 1");
    if (!(beta > 0.0)) throw std::invalid_argument("selberg_log_partition requires beta > 0");
    return n * std::log(2.0 * kPi) + std::lgamma(1.0 + 0.5 * beta * n) -
           n * std::lgamma(1.0 + 0.5 * beta);
}

double log_gas_free_energy(double beta, double rho) {
    if (!(beta > 0.0) || !(rho > 0.0))
        throw std::invalid_argument("log_gas_free_energy requires beta, rho > 0");
    return rho * (std::lgamma(1.0 + 0.5 * beta) / beta - 0.5 * std::log(kPi * beta)) +
           (2.0 - beta) / (2.0 * beta) * rho * (std::log(rho) - 1.0);
}

double f2d_beta2(double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("f2d_beta2 requires rho > 0");
    return -std::log(2.0 * kPi * kPi) / 4.0 * rho + rho * std::log(rho) / 4.0;
}

double sine_kernel_rho2T(double r, SineKernelMode mode, bool* warning) {
    if (!(r > 0.0)) throw std::invalid_argument("sine_kernel_rho2T requires r > 0");
    if (warning) *warning = false;
    switch (mode) {
        case SineKernelMode::exact2: {
            double t = std::sin(kPi * r) / (kPi * r);
            return -t * t;
        }
        case SineKernelMode::asymptotic1: {
            if (r < 2.0 && warning) *warning = true;
            double r2 = r * r;
            return -1.0 / (kPi * kPi * r2) +
                   (3.0 + std::cos(2.0 * kPi * r)) / (2.0 * std::pow(kPi, 4) * r2 * r2);
        }
        case SineKernelMode::asymptotic4: {
            if (r < 2.0 && warning) *warning = true;
            return std::cos(2.0 * kPi * r) / (4.0 * r) -
                   (1.0 + 0.5 * kPi * std::sin(2.0 * kPi * r)) / (4.0 * kPi * kPi * r * r);
        }
    }
    throw std::logic_error("unreachable");
}

ReferenceConstant reference_constant(const std::string& name) {
    static const std::map<std::string, ReferenceConstant> registry = {
        {"lieb_narnhofer_d3",
         {0.6 * std::pow(4.5 * kPi, 1.0 / 3.0),
          "(3/5)(9 pi/2)^{1/3}: 3D Coulomb jellium stability constant (Lieb-Narnhofer)"}},
        {"lieb_narnhofer_d2",
         {3.0 / 8.0 + 0.25 * std::log(kPi),
          "3/8 + (1/4) log pi: 2D log-gas jellium stability constant"}},
        {"e_1d_coulomb",
         {1.0 / 12.0, "1/12 = -zeta(-1): energy density of the 1D Coulomb crystal"}},
        {"e_1d_log_gas",
         {-0.5 * std::log(2.0 * kPi),
          "zeta'(0) = -log(2 pi)/2: ground-state energy density of the 1D log gas"}},
        {"zeta_bcc_s1",
         {-1.4442, "zeta_BCC(1) at unit covolume, 4-digit literature value"}},
        {"zeta_deriv0_triangular",
         {-0.6606, "zeta'_trg(0) at unit covolume, 4-digit literature value"}},
    };
    auto it = registry.find(name);
    if (it == registry.end())
        throw std::invalid_argument("unknown reference constant: " + name);
    return it->second;
}

std::vector<std::string> reference_constant_names() {
    return {"lieb_narnhofer_d3", "lieb_narnhofer_d2", "e_1d_coulomb",
            "e_1d_log_gas",      "zeta_bcc_s1",       "zeta_deriv0_triangular"};
}

}  // namespace rieszgas
