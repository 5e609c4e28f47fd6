#pragma once
// optimize.hpp - zero-temperature local minimization over point positions,
// grand-canonical particle-number scans, crystallinity diagnostics.

#include <cstdint>
#include <optional>

#include "rieszgas/jellium.hpp"
#include "rieszgas/riesz.hpp"

namespace rieszgas {

struct OptimizerSettings {
    int max_iterations = 5000;
    double gradient_tolerance = 1e-9;  // on the max projected-gradient component
    int restarts = 16;
    std::uint64_t seed = 1;
    double initial_step = 0.05;
};

struct MinimizationResult {
    PointConfiguration configuration;
    double energy = 0.0;
    double gradient_norm = 0.0;  // max-abs projected gradient component
    int restart_index = -1;
    bool converged = false;
    int iterations = 0;
};

// energy landscape selector
struct MinProblem {
    enum class Kind { shortRange, jellium, periodic };
    Kind kind = Kind::shortRange;
    Domain domain;                           // shortRange / jellium
    double rho_b = 1.0;                      // jellium background density
    std::shared_ptr<const Lattice> lattice;  // periodic
    double ell = 1.0;

    static MinProblem short_range(Domain dom);
    static MinProblem jellium(Domain dom, double rho_b);
    static MinProblem periodic(std::shared_ptr<const Lattice> lat, double ell);
};

double problem_energy(const MinProblem& problem, const RieszExponent& exp,
                      const std::vector<double>& coords);

// best-of-restarts projected gradient descent with Barzilai-Borwein steps and
// a backtracking safeguard; restart 0 starts from the reference grid/lattice
MinimizationResult minimize_energy(const MinProblem& problem, int n, const RieszExponent& exp,
                                   const OptimizerSettings& settings = {});

// scan E(n) - mu*n over n in [n_lo, n_hi]; ties break toward smaller n
struct GrandCanonicalResult {
    int n_star = 0;
    MinimizationResult result;
};
GrandCanonicalResult minimize_grand_canonical(const MinProblem& problem, double mu,
                                              const RieszExponent& exp, int n_lo, int n_hi,
                                              const OptimizerSettings& settings = {});

struct CrystallinityReport {
    double min_distance = 0.0;
    double covering_radius = 0.0;
    double lattice_fit_error = -1.0;  // -1 when no reference was supplied
};

// min pairwise distance (minimum image on tori), covering radius over a grid,
// and the RMS deviation from the best translate of the reference points
CrystallinityReport crystallinity_report(const PointConfiguration& config,
                                         const PointConfiguration* reference = nullptr);

}  // namespace rieszgas
