#pragma once
// exact.hpp - closed-form references: the 1D Coulomb transfer operator,
// Selberg partition functions, log-gas free energies, sine-kernel
// correlations and the named-constant registry.

#include <string>
#include <vector>

namespace rieszgas {

struct TransferOperatorGrid {
    double y_max = 0.0;  // 0 = auto: e^{-beta y^2/2} < 1e-16 at the edge
    int nodes = 256;     // >= 64
};

struct KunzSolution {
    double lambda1 = 0.0;
    std::vector<double> nodes;    // Gauss-Legendre grid on [-y_max, y_max]
    std::vector<double> weights;
    std::vector<double> psi;      // right Perron eigenfunction, int psi^2 = 1
    double lambda1_left = 0.0;    // from the transposed operator (diagnostic)
    double y_max = 0.0;
    double beta = 0.0;
};

// Largest eigenvalue and positive eigenfunction of the kernel
// K(y,z) = e^{-beta (y^2+z^2)/2} 1(y - z >= -1) by collocation with exact
// row-wise cumulative integrals, then power iteration.
KunzSolution kunz_lambda1(double beta, const TransferOperatorGrid& grid = {});

// f(-1, beta) = 1/12 - log(lambda_1(beta)) / beta
double kunz_free_energy(double beta);

// bulk one-point density of the 1D Coulomb gas at unit background:
// rho(x) = sum_k psi(x+k+tau) psi(-x-k-tau) / <psi, psi(-.)>
double kunz_density(const KunzSolution& sol, double x, double tau = 0.0);

// log of int_{[0,2pi]^N} prod_{j<k} |e^{i th_j} - e^{i th_k}|^beta dtheta =
// N log(2 pi) + log Gamma(1 + beta N / 2) - N log Gamma(1 + beta / 2)
double selberg_log_partition(int n, double beta);

// 1D log-gas free energy density
// f(0,beta,rho) = rho (log Gamma(1+beta/2)/beta - log(pi beta)/2)
//                 + (2-beta)/(2 beta) rho (log rho - 1)
double log_gas_free_energy(double beta, double rho);

// 2D Coulomb gas at beta = 2: f(0,2,rho) = -log(2 pi^2)/4 rho + rho log(rho)/4
double f2d_beta2(double rho);

enum class SineKernelMode { exact2, asymptotic1, asymptotic4 };

// truncated two-point function of the 1D log gas at unit density;
// beta = 2 exact, beta in {1,4} as large-r asymptotics (validity r >= 2,
// *warning set when evaluated below)
double sine_kernel_rho2T(double r, SineKernelMode mode, bool* warning = nullptr);

struct ReferenceConstant {
    double value;
    std::string provenance;
};

// fixed registry of named constants; throws on unknown names
ReferenceConstant reference_constant(const std::string& name);
std::vector<std::string> reference_constant_names();

}  // namespace rieszgas
