#include "rieszgas/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rieszgas/quadrature.hpp"

namespace rieszgas {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }

}  // namespace

McProblem McProblem::short_range(Domain dom, double s) {
    if (!(s > dom.d)) throw std::invalid_argument("short-range sampling requires s > d");
    McProblem p;
    p.kind = Kind::shortRange;
    p.domain = std::move(dom);
    p.d = p.domain.d;
    p.s = s;
    return p;
}

McProblem McProblem::jellium_problem(Domain dom, double rho_b, double s) {
    McProblem p;
    p.kind = Kind::jellium;
    p.domain = std::move(dom);
    p.d = p.domain.d;
    p.s = s;
    p.rho_b = rho_b;
    return p;
}

McProblem McProblem::periodic(std::shared_ptr<const Lattice> lat, double ell, double s) {
    if (!lat) throw std::invalid_argument("periodic sampling requires a lattice");
    McProblem p;
    p.kind = Kind::periodic;
    int d = lat->dim();
    double b[9];
    for (int i = 0; i < d * d; ++i) b[i] = lat->basis()[i] * ell;
    p.lattice = std::make_shared<Lattice>(Lattice::from_basis(d, b));
    p.d = d;
    p.s = s;
    p.domain = Domain::periodic_cell(p.lattice, 1.0);
    return p;
}

McProblem McProblem::circular_log_gas(int n) {
    if (n < 1) throw std::invalid_argument("circular log gas requires n >= 1");
    McProblem p;
    p.kind = Kind::circular;
    p.d = 1;
    p.s = 0.0;
    p.circumference = n;  // unit density arc-length coordinates
    return p;
}

McProblem McProblem::ideal(Domain dom) {
    McProblem p;
    p.kind = Kind::ideal;
    p.domain = std::move(dom);
    p.d = p.domain.d;
    return p;
}

double Sampler::rand01() {
    std::uint64_t s0 = rng_state_[0], s1 = rng_state_[1];
    std::uint64_t result = s0 + s1;
    s1 ^= s0;
    rng_state_[0] = ((s0 << 55) | (s0 >> 9)) ^ s1 ^ (s1 << 14);
    rng_state_[1] = (s1 << 36) | (s1 >> 28);
    return static_cast<double>(result >> 11) * 0x1.0p-53;
}

Sampler::Sampler(McProblem problem, int n0, SamplerConfig cfg)
    : problem_(std::move(problem)), cfg_(cfg) {
    if (cfg_.sweeps <= cfg_.burn_in || cfg_.burn_in < 0)
        throw std::invalid_argument("sampler requires sweeps > burn_in >= 0");
    if (cfg_.thinning < 1) throw std::invalid_argument("thinning must be >= 1");
    if (!(cfg_.beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (n0 < 0) throw std::invalid_argument("negative particle count");
    if (cfg_.mu) {
        bool ok = problem_.kind == McProblem::Kind::ideal ||
                  (problem_.kind == McProblem::Kind::shortRange && problem_.s > problem_.d) ||
                  (problem_.kind == McProblem::Kind::jellium && problem_.s > 0.0 &&
                   problem_.s < problem_.d);
        if (!ok)
            throw std::domain_error(
                "grand-canonical sampling needs s > d (free) or 0 < s < d (jellium)");
    }
    if (problem_.kind == McProblem::Kind::jellium) {
        jsys_.emplace(problem_.domain, problem_.rho_b, RieszExponent(problem_.s, problem_.d));
        jellium_self_ = background_self_energy(*jsys_);
    }
    scale_ = cfg_.move_scale;
    std::uint64_t seed = cfg_.seed;
    rng_state_[0] = splitmix64(seed);
    rng_state_[1] = splitmix64(seed);

    n_ = n0;
    x_.assign(static_cast<size_t>(n_) * problem_.d, 0.0);
    // initial placement: uniform, with the coincidence guard
    int d = problem_.d;
    for (int j = 0; j < n_; ++j) {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            double p[3] = {0, 0, 0};
            if (problem_.kind == McProblem::Kind::circular) {
                p[0] = rand01() * problem_.circumference;
            } else if (problem_.kind == McProblem::Kind::periodic) {
                double f[3] = {rand01(), rand01(), rand01()};
                for (int i = 0; i < d; ++i) {
                    p[i] = 0.0;
                    for (int m = 0; m < d; ++m)
                        p[i] += problem_.lattice->basis()[i + d * m] * f[m];
                }
            } else if (problem_.domain.kind == Domain::Kind::ball) {
                for (;;) {
                    double q = 0.0;
                    for (int i = 0; i < d; ++i) {
                        p[i] = -1.0 + 2.0 * rand01();
                        q += p[i] * p[i];
                    }
                    if (q <= 1.0) break;
                }
                for (int i = 0; i < d; ++i)
                    p[i] = problem_.domain.center[i] + problem_.domain.radius * p[i];
            } else {
                for (int i = 0; i < d; ++i)
                    p[i] = problem_.domain.lo[i] +
                           (problem_.domain.hi[i] - problem_.domain.lo[i]) * rand01();
            }
            bool clash = false;
            for (int k = 0; k < j && !clash; ++k) {
                double q = 0.0;
                for (int i = 0; i < d; ++i) q += (p[i] - x_[k * d + i]) * (p[i] - x_[k * d + i]);
                clash = q < 1e-20;
            }
            if (!clash) {
                for (int i = 0; i < d; ++i) x_[j * d + i] = p[i];
                break;
            }
        }
    }
    energy_ = total_energy();
}

namespace {

double pair_v(const McProblem& p, const double* a, const double* b) {
    int d = p.d;
    switch (p.kind) {
        case McProblem::Kind::ideal:
            return 0.0;
        case McProblem::Kind::circular: {
            double delta = std::fabs(a[0] - b[0]);
            double theta = 2.0 * kPi * delta / p.circumference;
            return -std::log(2.0 * std::fabs(std::sin(0.5 * theta)));
        }
        case McProblem::Kind::periodic: {
            double diff[3] = {0, 0, 0};
            for (int i = 0; i < d; ++i) diff[i] = a[i] - b[i];
            return periodic_potential(*p.lattice, p.s, diff);
        }
        default: {
            double q = 0.0;
            for (int i = 0; i < d; ++i) q += (a[i] - b[i]) * (a[i] - b[i]);
            return potential_value(p.s, std::sqrt(q));
        }
    }
}

}  // namespace

double Sampler::total_energy() const {
    double e = 0.0;
    int d = problem_.d;
    for (int j = 0; j < n_; ++j)
        for (int k = j + 1; k < n_; ++k) e += pair_v(problem_, &x_[j * d], &x_[k * d]);
    if (problem_.kind == McProblem::Kind::jellium) {
        for (int j = 0; j < n_; ++j)
            e -= problem_.rho_b * background_potential(*jsys_, &x_[j * d]);
        e += jellium_self_;
    }
    if (problem_.kind == McProblem::Kind::periodic)
        e += n_ * madelung(*problem_.lattice, problem_.s) / 2.0;
    return e;
}

double Sampler::move_delta(int j, const double* proposed) const {
    int d = problem_.d;
    double delta = 0.0;
    for (int k = 0; k < n_; ++k) {
        if (k == j) continue;
        delta += pair_v(problem_, proposed, &x_[k * d]) -
                 pair_v(problem_, &x_[j * d], &x_[k * d]);
    }
    if (problem_.kind == McProblem::Kind::jellium) {
        delta -= problem_.rho_b * (background_potential(*jsys_, proposed) -
                                   background_potential(*jsys_, &x_[j * d]));
    }
    return delta;
}

double Sampler::insertion_delta(const double* pos) const {
    int d = problem_.d;
    double delta = 0.0;
    for (int k = 0; k < n_; ++k) delta += pair_v(problem_, pos, &x_[k * d]);
    if (problem_.kind == McProblem::Kind::jellium)
        delta -= problem_.rho_b * background_potential(*jsys_, pos);
    return delta;
}

void Sampler::displacement_move() {
    if (n_ == 0) return;
    int d = problem_.d;
    int j = std::min(static_cast<int>(rand01() * n_), n_ - 1);
    double prop[3] = {0, 0, 0};
    for (int i = 0; i < d; ++i) prop[i] = x_[j * d + i] + scale_ * (2.0 * rand01() - 1.0);
    ++attempted_;
    ++tune_attempted_;

    // wrap / reject outside
    if (problem_.kind == McProblem::Kind::circular) {
        prop[0] -= problem_.circumference * std::floor(prop[0] / problem_.circumference);
    } else if (problem_.kind == McProblem::Kind::periodic) {
        problem_.domain.project(prop);
    } else {
        if (!problem_.domain.contains(prop, 0.0)) return;
    }
    // coincidence guard
    for (int k = 0; k < n_; ++k) {
        if (k == j) continue;
        double q = 0.0;
        for (int i = 0; i < d; ++i) q += (prop[i] - x_[k * d + i]) * (prop[i] - x_[k * d + i]);
        if (q < 1e-24) return;
    }
    double delta = move_delta(j, prop);
    if (delta <= 0.0 || rand01() < std::exp(-cfg_.beta * delta)) {
        for (int i = 0; i < d; ++i) x_[j * d + i] = prop[i];
        energy_ += delta;
        ++accepted_;
        ++tune_accepted_;
    }
}

void Sampler::insert_move() {
    int d = problem_.d;
    double pos[3] = {0, 0, 0};
    const Domain& dom = problem_.domain;
    if (dom.kind == Domain::Kind::ball) {
        for (;;) {
            double q = 0.0;
            for (int i = 0; i < d; ++i) {
                pos[i] = -1.0 + 2.0 * rand01();
                q += pos[i] * pos[i];
            }
            if (q <= 1.0) break;
        }
        for (int i = 0; i < d; ++i) pos[i] = dom.center[i] + dom.radius * pos[i];
    } else {
        for (int i = 0; i < d; ++i)
            pos[i] = dom.lo[i] + (dom.hi[i] - dom.lo[i]) * rand01();
    }
    for (int k = 0; k < n_; ++k) {
        double q = 0.0;
        for (int i = 0; i < d; ++i) q += (pos[i] - x_[k * d + i]) * (pos[i] - x_[k * d + i]);
        if (q < 1e-24) return;
    }
    double delta = insertion_delta(pos);
    double z = std::exp(cfg_.beta * *cfg_.mu);
    double ratio = z * dom.volume() / (n_ + 1) * std::exp(-cfg_.beta * delta);
    if (rand01() < std::min(1.0, ratio)) {
        for (int i = 0; i < d; ++i) x_.push_back(pos[i]);
        ++n_;
        energy_ += delta;
    }
}

void Sampler::delete_move() {
    if (n_ == 0) return;
    int d = problem_.d;
    int j = std::min(static_cast<int>(rand01() * n_), n_ - 1);
    double pos[3] = {0, 0, 0};
    for (int i = 0; i < d; ++i) pos[i] = x_[j * d + i];
    // energy released by removing j
    std::vector<double> backup(x_.begin() + static_cast<size_t>(j) * d,
                               x_.begin() + static_cast<size_t>(j + 1) * d);
    // temporarily remove
    x_.erase(x_.begin() + static_cast<size_t>(j) * d,
             x_.begin() + static_cast<size_t>(j + 1) * d);
    --n_;
    double delta = -insertion_delta(pos);
    double z = std::exp(cfg_.beta * *cfg_.mu);
    double ratio = (n_ + 1) / (z * problem_.domain.volume()) * std::exp(-cfg_.beta * delta);
    if (rand01() < std::min(1.0, ratio)) {
        energy_ += delta;
    } else {
        x_.insert(x_.end(), backup.begin(), backup.end());
        std::rotate(x_.begin() + static_cast<size_t>(j) * d,
                    x_.end() - d, x_.end());
        ++n_;
    }
}

void Sampler::tune() {
    if (tune_attempted_ < 50) return;
    double rate = static_cast<double>(tune_accepted_) / tune_attempted_;
    if (rate < 0.30) scale_ *= 0.8;
    if (rate > 0.50) scale_ *= 1.25;
    scale_ = std::clamp(scale_, 1e-7, 1e3);
    tune_accepted_ = tune_attempted_ = 0;
}

void Sampler::sweep_once() {
    int attempts = std::max(n_, 4);
    bool gc = cfg_.mu.has_value();
    for (int a = 0; a < attempts; ++a) {
        if (!gc) {
            displacement_move();
        } else {
            double r = rand01();
            if (r < 0.5) {
                displacement_move();
            } else if (r < 0.75) {
                insert_move();
            } else {
                delete_move();
            }
        }
    }
    ++sweep_;
    if (sweep_ <= cfg_.burn_in) {
        if (sweep_ % 25 == 0) tune();
        if (sweep_ == cfg_.burn_in) {
            accepted_ = attempted_ = 0;  // statistics restart after tuning freezes
        }
    }
    if (sweep_ % 100 == 0) {
        double full = total_energy();
        if (std::fabs(full - energy_) > 1e-8 * std::max(1.0, std::fabs(full)))
            warnings_.push_back("incremental energy drift exceeded 1e-8 at sweep " +
                                std::to_string(sweep_));
        energy_ = full;
    }
    if (!warned_rate_ && sweep_ > cfg_.burn_in && attempted_ > 2000) {
        double rate = acceptance_rate();
        if (rate < 0.05 || rate > 0.95) {
            warnings_.push_back("acceptance rate " + std::to_string(rate) +
                                " outside [0.05, 0.95]");
            warned_rate_ = true;
        }
    }
}

std::optional<Frame> Sampler::next() {
    while (sweep_ < cfg_.sweeps) {
        sweep_once();
        if (sweep_ > cfg_.burn_in && (sweep_ - cfg_.burn_in) % cfg_.thinning == 0) {
            Frame f;
            f.sweep = sweep_;
            f.coords = x_;
            f.energy = energy_;
            return f;
        }
    }
    return std::nullopt;
}

double Sampler::acceptance_rate() const {
    return attempted_ == 0 ? 0.0 : static_cast<double>(accepted_) / attempted_;
}

double EstimatorGeometry::volume() const {
    switch (kind) {
        case Kind::interval:
        case Kind::circle:
            return length;
        case Kind::periodicCell:
            return lattice->covolume();
        case Kind::box:
            return domain.volume();
    }
    return 0.0;
}

EstimatorGeometry EstimatorGeometry::from_problem(const McProblem& p) {
    EstimatorGeometry g;
    g.d = p.d;
    switch (p.kind) {
        case McProblem::Kind::circular:
            g.kind = Kind::circle;
            g.length = p.circumference;
            break;
        case McProblem::Kind::periodic:
            g.kind = Kind::periodicCell;
            g.lattice = p.lattice;
            break;
        default:
            if (p.d == 1 && p.domain.kind == Domain::Kind::interval) {
                g.kind = Kind::interval;
                g.length = p.domain.hi[0] - p.domain.lo[0];
            } else {
                g.kind = Kind::box;
            }
            g.domain = p.domain;
            break;
    }
    return g;
}

namespace {

double geom_distance(const EstimatorGeometry& g, const double* a, const double* b) {
    switch (g.kind) {
        case EstimatorGeometry::Kind::circle: {
            double delta = std::fabs(a[0] - b[0]);
            return std::min(delta, g.length - delta);
        }
        case EstimatorGeometry::Kind::periodicCell:
            return g.lattice->min_image_distance(a, b);
        default: {
            double q = 0.0;
            for (int i = 0; i < g.d; ++i) q += (a[i] - b[i]) * (a[i] - b[i]);
            return std::sqrt(q);
        }
    }
}

// measure of {(x,y) in Omega^2 : |x-y| in [r, r+dr)} / dr, the pair-geometry
// factor used to normalize histograms
std::vector<double> pair_geometry_factor(const EstimatorGeometry& g,
                                         const std::vector<double>& centers, double width) {
    std::vector<double> f(centers.size(), 0.0);
    double vol = g.volume();
    switch (g.kind) {
        case EstimatorGeometry::Kind::interval:
            for (size_t i = 0; i < centers.size(); ++i)
                f[i] = 2.0 * std::max(g.length - centers[i], 0.0);
            break;
        case EstimatorGeometry::Kind::circle:
            for (size_t i = 0; i < centers.size(); ++i)
                f[i] = centers[i] < 0.5 * g.length ? 2.0 * g.length : 0.0;
            break;
        case EstimatorGeometry::Kind::periodicCell:
            for (size_t i = 0; i < centers.size(); ++i)
                f[i] = vol * sphere_area(g.d) * std::pow(centers[i], g.d - 1);
            break;
        case EstimatorGeometry::Kind::box: {
            // deterministic Monte Carlo estimate of the overlap factor
            std::uint64_t state = 20140703ull;
            int samples = 400000;
            std::vector<double> hist(centers.size(), 0.0);
            int d = g.d;
            for (int t = 0; t < samples; ++t) {
                double p[6];
                for (int i = 0; i < 2 * d; ++i) {
                    int axis = i % d;
                    p[i] = g.domain.lo[axis] +
                           (g.domain.hi[axis] - g.domain.lo[axis]) *
                               (static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53);
                }
                double q = 0.0;
                for (int i = 0; i < d; ++i) q += (p[i] - p[d + i]) * (p[i] - p[d + i]);
                double r = std::sqrt(q);
                int bin = static_cast<int>((r - (centers[0] - 0.5 * width)) / width);
                if (bin >= 0 && bin < static_cast<int>(hist.size())) hist[bin] += 1.0;
            }
            for (size_t i = 0; i < centers.size(); ++i)
                f[i] = hist[i] / samples * vol * vol / width;
            break;
        }
    }
    return f;
}

}  // namespace

CorrelationEstimate estimate_correlations(const std::vector<Frame>& frames,
                                          const EstimatorGeometry& geom, int bins,
                                          double r_max) {
    if (frames.size() < 100)
        throw std::invalid_argument("correlation estimate requires >= 100 frames");
    if (bins < 2 || !(r_max > 0.0)) throw std::invalid_argument("invalid binning");
    int d = geom.d;
    const int blocks = 16;
    size_t per_block = frames.size() / blocks;
    if (per_block == 0) throw std::invalid_argument("too few frames for 16 blocks");

    double width = r_max / bins;
    CorrelationEstimate est;
    est.bin_centers.resize(bins);
    for (int b = 0; b < bins; ++b) est.bin_centers[b] = (b + 0.5) * width;
    auto factor = pair_geometry_factor(geom, est.bin_centers, width);

    double vol = geom.volume();
    std::vector<std::vector<double>> rho2_blocks(blocks, std::vector<double>(bins, 0.0));
    std::vector<double> rho1_blocks(blocks, 0.0);
    std::vector<double> total_pairs(bins, 0.0);

    bool profile = geom.kind == EstimatorGeometry::Kind::interval ||
                   geom.kind == EstimatorGeometry::Kind::circle;
    int pbins = profile ? bins : 0;
    std::vector<std::vector<double>> prof_blocks(blocks, std::vector<double>(pbins, 0.0));
    double plen = profile ? geom.length : 1.0;
    double pwidth = profile ? plen / std::max(pbins, 1) : 1.0;

    for (int blk = 0; blk < blocks; ++blk) {
        auto& hist = rho2_blocks[blk];
        double count_sum = 0.0;
        for (size_t t = blk * per_block; t < (blk + 1) * per_block; ++t) {
            const auto& f = frames[t];
            int n = static_cast<int>(f.coords.size()) / d;
            count_sum += n;
            for (int j = 0; j < n; ++j) {
                for (int k = j + 1; k < n; ++k) {
                    double r = geom_distance(geom, &f.coords[j * d], &f.coords[k * d]);
                    int bin = static_cast<int>(r / width);
                    if (bin >= 0 && bin < bins) {
                        hist[bin] += 1.0;
                        total_pairs[bin] += 1.0;
                    }
                }
                if (profile) {
                    double pos = f.coords[j * d];
                    if (geom.kind == EstimatorGeometry::Kind::interval)
                        pos -= geom.domain.lo[0];
                    int pb = static_cast<int>(pos / pwidth);
                    if (pb >= 0 && pb < pbins) prof_blocks[blk][pb] += 1.0;
                }
            }
        }
        rho1_blocks[blk] = count_sum / per_block / vol;
        for (int b = 0; b < bins; ++b) {
            double denom = factor[b] * width * per_block;
            hist[b] = denom > 0.0 ? 2.0 * hist[b] / denom : 0.0;
        }
        if (profile)
            for (int b = 0; b < pbins; ++b) prof_blocks[blk][b] /= per_block * pwidth;
    }

    est.rho2.assign(bins, 0.0);
    est.rho2_stderr.assign(bins, 0.0);
    est.rho2T.assign(bins, 0.0);
    est.rho2T_stderr.assign(bins, 0.0);
    est.missing.assign(bins, false);
    double rho1_mean = 0.0;
    for (int blk = 0; blk < blocks; ++blk) rho1_mean += rho1_blocks[blk];
    rho1_mean /= blocks;
    double rho1_var = 0.0;
    for (int blk = 0; blk < blocks; ++blk)
        rho1_var += (rho1_blocks[blk] - rho1_mean) * (rho1_blocks[blk] - rho1_mean);
    est.rho1 = rho1_mean;
    est.rho1_stderr = std::sqrt(rho1_var / (blocks - 1.0) / blocks);

    for (int b = 0; b < bins; ++b) {
        if (total_pairs[b] == 0.0) {
            est.missing[b] = true;
            continue;
        }
        double m2 = 0.0, m2T = 0.0;
        for (int blk = 0; blk < blocks; ++blk) {
            m2 += rho2_blocks[blk][b];
            m2T += rho2_blocks[blk][b] - rho1_blocks[blk] * rho1_blocks[blk];
        }
        m2 /= blocks;
        m2T /= blocks;
        double v2 = 0.0, v2T = 0.0;
        for (int blk = 0; blk < blocks; ++blk) {
            double t2 = rho2_blocks[blk][b] - m2;
            double t2T = rho2_blocks[blk][b] - rho1_blocks[blk] * rho1_blocks[blk] - m2T;
            v2 += t2 * t2;
            v2T += t2T * t2T;
        }
        est.rho2[b] = m2;
        est.rho2T[b] = m2T;
        est.rho2_stderr[b] = std::sqrt(v2 / (blocks - 1.0) / blocks);
        est.rho2T_stderr[b] = std::sqrt(v2T / (blocks - 1.0) / blocks);
    }

    if (profile) {
        est.rho1_profile.assign(pbins, 0.0);
        est.rho1_profile_stderr.assign(pbins, 0.0);
        for (int b = 0; b < pbins; ++b) {
            double m = 0.0;
            for (int blk = 0; blk < blocks; ++blk) m += prof_blocks[blk][b];
            m /= blocks;
            double v = 0.0;
            for (int blk = 0; blk < blocks; ++blk)
                v += (prof_blocks[blk][b] - m) * (prof_blocks[blk][b] - m);
            est.rho1_profile[b] = m;
            est.rho1_profile_stderr[b] = std::sqrt(v / (blocks - 1.0) / blocks);
        }
    }
    return est;
}

VarianceCurve number_variance(const std::vector<Frame>& frames, const EstimatorGeometry& geom,
                              const std::vector<double>& window_fractions) {
    if (frames.size() < 32) throw std::invalid_argument("too few frames for number variance");
    int d = geom.d;
    const int blocks = 16;
    size_t per_block = frames.size() / blocks;
    VarianceCurve curve;

    for (double frac : window_fractions) {
        if (!(frac > 0.0) || frac > 0.5 + 1e-12)
            throw std::invalid_argument("window fractions must lie in (0, 1/2]");
        double volD = 0.0;
        auto in_window = [&](const double* p) {
            switch (geom.kind) {
                case EstimatorGeometry::Kind::circle:
                    return p[0] < frac * geom.length;
                case EstimatorGeometry::Kind::interval: {
                    double mid = geom.domain.lo[0] + 0.5 * geom.length;
                    double half = 0.5 * frac * geom.length;
                    return p[0] > mid - half && p[0] < mid + half;
                }
                case EstimatorGeometry::Kind::periodicCell: {
                    // fractional sub-box [0, frac^{1/d})^d
                    double side = std::pow(frac, 1.0 / d);
                    double f[3] = {0, 0, 0};
                    for (int i = 0; i < d; ++i)
                        for (int m = 0; m < d; ++m)
                            f[i] += geom.lattice->dual_basis()[m + d * i] * p[m];
                    for (int i = 0; i < d; ++i) {
                        double u = f[i] - std::floor(f[i]);
                        if (u >= side) return false;
                    }
                    return true;
                }
                case EstimatorGeometry::Kind::box: {
                    double side = std::pow(frac, 1.0 / d);
                    for (int i = 0; i < d; ++i) {
                        double mid = 0.5 * (geom.domain.lo[i] + geom.domain.hi[i]);
                        double half = 0.5 * side * (geom.domain.hi[i] - geom.domain.lo[i]);
                        if (p[i] < mid - half || p[i] > mid + half) return false;
                    }
                    return true;
                }
            }
            return false;
        };
        volD = frac * geom.volume();

        std::vector<double> block_mean(blocks, 0.0), block_var(blocks, 0.0);
        for (int blk = 0; blk < blocks; ++blk) {
            double s1 = 0.0, s2 = 0.0;
            for (size_t t = blk * per_block; t < (blk + 1) * per_block; ++t) {
                const auto& f = frames[t];
                int n = static_cast<int>(f.coords.size()) / d;
                int c = 0;
                for (int j = 0; j < n; ++j)
                    if (in_window(&f.coords[j * d])) ++c;
                s1 += c;
                s2 += static_cast<double>(c) * c;
            }
            block_mean[blk] = s1 / per_block;
            block_var[blk] = s2 / per_block - block_mean[blk] * block_mean[blk];
        }
        double mv = 0.0, mm = 0.0;
        for (int blk = 0; blk < blocks; ++blk) {
            mv += block_var[blk];
            mm += block_mean[blk];
        }
        mv /= blocks;
        mm /= blocks;
        double vv = 0.0;
        for (int blk = 0; blk < blocks; ++blk)
            vv += (block_var[blk] - mv) * (block_var[blk] - mv);
        curve.window_sizes.push_back(volD);
        curve.variance.push_back(mv);
        curve.variance_stderr.push_back(std::sqrt(vv / (blocks - 1.0) / blocks));
        curve.mean_count.push_back(mm);
        curve.ratio.push_back(mv / volD);
    }
    size_t m = curve.ratio.size();
    if (m >= 3) {
        curve.hyperuniform_trend =
            curve.ratio[m - 1] < curve.ratio[m - 2] && curve.ratio[m - 2] < curve.ratio[m - 3];
    }
    if (m >= 1) curve.compressibility = curve.ratio[m - 1];
    return curve;
}

double sum_rule_residual(double rho, const std::vector<double>& bin_centers,
                         const std::vector<double>& rho2T, int d) {
    if (bin_centers.size() != rho2T.size() || bin_centers.size() < 2)
        throw std::invalid_argument("sum rule needs matching binned input");
    double width = bin_centers[1] - bin_centers[0];
    double area = sphere_area(d);
    double integral = 0.0;
    for (size_t b = 0; b < bin_centers.size(); ++b) {
        double r = bin_centers[b];
        integral += rho2T[b] * area * std::pow(r, d - 1) * width;
    }
    return rho + integral;
}

double sum_rule_residual_sine2() {
    // rho = 1; int_R rho2T = -2 int_0^inf sin^2(pi r)/(pi r)^2 dr
    double integral = 0.0;
    std::vector<double> xs, ws;
    const double R = 4000.0;
    for (double a = 0.0; a < R; a += 1.0) {
        gauss_legendre_on(12, a, a + 1.0, xs, ws);
        for (size_t i = 0; i < xs.size(); ++i) {
            double t = std::sin(kPi * xs[i]) / (kPi * xs[i]);
            integral += ws[i] * t * t;
        }
    }
    integral += 1.0 / (2.0 * kPi * kPi * R);  // monotone part of the tail
    return 1.0 - 2.0 * integral;
}

}  // namespace rieszgas
