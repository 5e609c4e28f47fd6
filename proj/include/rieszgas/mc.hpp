#pragma once
// mc.hpp - Metropolis sampling of canonical and grand-canonical Gibbs
// measures, with correlation, number-variance and sum-rule estimators.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rieszgas/jellium.hpp"
#include "rieszgas/riesz.hpp"

namespace rieszgas {

struct SamplerConfig {
    double beta = 1.0;
    std::optional<double> mu;  // grand-canonical when set
    double move_scale = 0.3;   // displacement half-width, auto-tuned in burn-in
    long long sweeps = 1000;
    long long burn_in = 100;
    int thinning = 1;
    std::uint64_t seed = 1;
};

struct McProblem {
    enum class Kind { shortRange, jellium, periodic, circular, ideal };
    Kind kind = Kind::ideal;
    double s = 1.0;
    int d = 1;
    Domain domain;                           // shortRange / jellium / ideal
    double rho_b = 1.0;                      // jellium
    std::shared_ptr<const Lattice> lattice;  // periodic cell ell*L (pre-scaled)
    double circumference = 1.0;              // circular log gas, arc-length units

    static McProblem short_range(Domain dom, double s);
    static McProblem jellium_problem(Domain dom, double rho_b, double s);
    static McProblem periodic(std::shared_ptr<const Lattice> lat, double ell, double s);
    static McProblem circular_log_gas(int n);  // circumference n (unit density)
    static McProblem ideal(Domain dom);        // V = 0 control
};

struct Frame {
    long long sweep = 0;
    std::vector<double> coords;  // n * d
    double energy = 0.0;
};

class Sampler {
  public:
    // canonical when cfg.mu is unset, grand-canonical otherwise
    Sampler(McProblem problem, int n0, SamplerConfig cfg);

    // next retained frame after burn-in, or nullopt when sweeps are exhausted
    std::optional<Frame> next();

    double acceptance_rate() const;  // since the end of burn-in
    double move_scale() const { return scale_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    int dimension() const { return problem_.d; }
    const McProblem& problem() const { return problem_; }

  private:
    void sweep_once();
    void displacement_move();
    void insert_move();
    void delete_move();
    double total_energy() const;
    double move_delta(int j, const double* proposed) const;
    double insertion_delta(const double* pos) const;  // energy change of adding pos
    void tune();

    McProblem problem_;
    SamplerConfig cfg_;
    std::vector<double> x_;
    int n_ = 0;
    double energy_ = 0.0;
    double scale_ = 0.3;
    long long sweep_ = 0;
    long long accepted_ = 0, attempted_ = 0;        // post burn-in
    long long tune_accepted_ = 0, tune_attempted_ = 0;
    std::vector<std::string> warnings_;
    bool warned_rate_ = false;
    std::uint64_t rng_state_[2];
    double rand01();
    std::optional<JelliumSystem> jsys_;
    double jellium_self_ = 0.0;
};

// estimator geometry: how pair distances are measured and normalized
struct EstimatorGeometry {
    enum class Kind { interval, circle, periodicCell, box };
    Kind kind = Kind::interval;
    int d = 1;
    double length = 1.0;                     // interval/circle length
    Domain domain;                           // box
    std::shared_ptr<const Lattice> lattice;  // periodic (pre-scaled)

    double volume() const;
    static EstimatorGeometry from_problem(const McProblem& p);
};

struct CorrelationEstimate {
    std::vector<double> bin_centers;
    std::vector<double> rho2, rho2_stderr;
    std::vector<double> rho2T, rho2T_stderr;
    std::vector<bool> missing;  // empty bins
    double rho1 = 0.0;          // mean density
    double rho1_stderr = 0.0;
    std::vector<double> rho1_profile;  // per position bin (interval/circle only)
    std::vector<double> rho1_profile_stderr;
};

// pair-distance histograms normalized so a Poisson process gives rho2T = 0;
// requires >= 100 frames, error bars from >= 16 blocks
CorrelationEstimate estimate_correlations(const std::vector<Frame>& frames,
                                          const EstimatorGeometry& geom, int bins,
                                          double r_max);

struct VarianceCurve {
    std::vector<double> window_sizes;  // |D|
    std::vector<double> variance, variance_stderr;
    std::vector<double> mean_count;
    std::vector<double> ratio;  // Var / |D|
    bool hyperuniform_trend = false;
    double compressibility = 0.0;  // Var/|D| at the largest window
};

VarianceCurve number_variance(const std::vector<Frame>& frames, const EstimatorGeometry& geom,
                              const std::vector<double>& window_fractions);

// rho + int rho2T over R^d from a binned estimate (trapezoidal over shells)
double sum_rule_residual(double rho, const std::vector<double>& bin_centers,
                         const std::vector<double>& rho2T, int d);

// rho + int of the analytic beta=2 sine-kernel rho2T at unit density
double sum_rule_residual_sine2();

}  // namespace rieszgas
