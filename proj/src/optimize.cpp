#include "rieszgas/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace rieszgas {

namespace {

struct Evaluator {
    const MinProblem& problem;
    const RieszExponent& exp;
    int n;
    int d;
    std::optional<JelliumSystem> jsys;
    double jellium_const = 0.0;  // background self-energy

    Evaluator(const MinProblem& p, const RieszExponent& e, int n_)
        : problem(p), exp(e), n(n_), d(e.d) {
        if (p.kind == MinProblem::Kind::jellium) {
            jsys.emplace(p.domain, p.rho_b, e);
            jellium_const = background_self_energy(*jsys);
        }
    }

    double energy(const std::vector<double>& x) const {
        double e = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) e += pair_term(x.data() + j * d, x.data() + k * d);
        if (problem.kind == MinProblem::Kind::jellium) {
            for (int j = 0; j < n; ++j)
                e -= problem.rho_b * background_potential(*jsys, x.data() + j * d);
            e += jellium_const;
        }
        if (problem.kind == MinProblem::Kind::periodic)
            e += n * madelung_term / 2.0;
        return e;
    }

    double pair_term(const double* a, const double* b) const {
        if (problem.kind == MinProblem::Kind::periodic) {
            double diff[3] = {0, 0, 0};
            for (int i = 0; i < d; ++i) diff[i] = a[i] - b[i];
            return periodic_potential(*lattice_scaled, exp.s, diff);
        }
        double q = 0.0;
        for (int i = 0; i < d; ++i) q += (a[i] - b[i]) * (a[i] - b[i]);
        return potential_value(exp.s, std::sqrt(q));
    }

    void gradient(const std::vector<double>& x, std::vector<double>& g) const {
        g.assign(n * d, 0.0);
        for (int j = 0; j < n; ++j) {
            for (int k = j + 1; k < n; ++k) {
                if (problem.kind == MinProblem::Kind::periodic) {
                    double diff[3] = {0, 0, 0};
                    for (int i = 0; i < d; ++i) diff[i] = x[j * d + i] - x[k * d + i];
                    auto pg = periodic_potential_gradient(*lattice_scaled, exp.s, diff);
                    for (int i = 0; i < d; ++i) {
                        g[j * d + i] += pg[i];
                        g[k * d + i] -= pg[i];
                    }
                } else {
                    double q = 0.0;
                    for (int i = 0; i < d; ++i) {
                        double dd = x[j * d + i] - x[k * d + i];
                        q += dd * dd;
                    }
                    double r = std::sqrt(q);
                    double vp = potential_derivative(exp.s, r);
                    for (int i = 0; i < d; ++i) {
                        double dir = (x[j * d + i] - x[k * d + i]) / r;
                        g[j * d + i] += vp * dir;
                        g[k * d + i] -= vp * dir;
                    }
                }
            }
            if (problem.kind == MinProblem::Kind::jellium) {
                auto bg = background_potential_gradient(*jsys, x.data() + j * d);
                for (int i = 0; i < d; ++i) g[j * d + i] -= problem.rho_b * bg[i];
            }
        }
    }

    double madelung_term = 0.0;
    std::shared_ptr<const Lattice> lattice_scaled;
};

void project_all(const MinProblem& problem, int n, int d, std::vector<double>& x) {
    for (int j = 0; j < n; ++j) {
        if (problem.kind == MinProblem::Kind::periodic) {
            double y[3] = {0, 0, 0};
            for (int i = 0; i < d; ++i) y[i] = x[j * d + i];
            problem.lattice->reduce(y);  // note: problem.lattice is pre-scaled below
            for (int i = 0; i < d; ++i) x[j * d + i] = y[i];
        } else {
            problem.domain.project(x.data() + j * d);
        }
    }
}

double min_pair_dist(const MinProblem& problem, int n, int d, const std::vector<double>& x) {
    double best = 1e300;
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            double r;
            if (problem.kind == MinProblem::Kind::periodic) {
                r = problem.lattice->min_image_distance(x.data() + j * d, x.data() + k * d);
            } else {
                double q = 0.0;
                for (int i = 0; i < d; ++i) {
                    double dd = x[j * d + i] - x[k * d + i];
                    q += dd * dd;
                }
                r = std::sqrt(q);
            }
            best = std::min(best, r);
        }
    }
    return best;
}

// starting configuration: restart 0 on the reference grid when one fits,
// otherwise uniform random placement
std::vector<double> initial_points(const MinProblem& problem, int n, int d, int restart,
                                   std::mt19937_64& rng) {
    std::vector<double> x(n * d);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    bool reference = restart == 0;
    if (problem.kind == MinProblem::Kind::periodic) {
        const Lattice& lat = *problem.lattice;
        if (reference && d == 1) {
            double cell = lat.covolume();
            for (int j = 0; j < n; ++j) x[j] = cell * (j + 0.5) / n;
            return x;
        }
        int k = static_cast<int>(std::round(std::pow(double(n), 1.0 / d)));
        if (reference && d > 1 && k >= 1 && std::pow(k, d) == n) {
            int idx = 0;
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < (d > 1 ? k : 1); ++b)
                    for (int c = 0; c < (d > 2 ? k : 1); ++c) {
                        double f[3] = {(a + 0.5) / k, (b + 0.5) / k, (c + 0.5) / k};
                        for (int i = 0; i < d; ++i) {
                            double v = 0.0;
                            for (int m = 0; m < d; ++m) v += lat.basis()[i + d * m] * f[m];
                            x[idx * d + i] = v;
                        }
                        ++idx;
                        if (idx == n) return x;
                    }
            return x;
        }
        // random fractional coordinates
        for (int j = 0; j < n; ++j) {
            double f[3] = {u01(rng), u01(rng), u01(rng)};
            for (int i = 0; i < d; ++i) {
                double v = 0.0;
                for (int m = 0; m < d; ++m) v += lat.basis()[i + d * m] * f[m];
                x[j * d + i] = v;
            }
        }
        return x;
    }
    const Domain& dom = problem.domain;
    if (reference && dom.kind == Domain::Kind::interval) {
        double L = dom.hi[0] - dom.lo[0];
        for (int j = 0; j < n; ++j) x[j] = dom.lo[0] + L * (j + 0.5) / n;
        return x;
    }
    for (int j = 0; j < n; ++j) {
        for (;;) {
            double p[3] = {0, 0, 0};
            if (dom.kind == Domain::Kind::ball) {
                double q = 0.0;
                for (int i = 0; i < d; ++i) {
                    p[i] = -1.0 + 2.0 * u01(rng);
                    q += p[i] * p[i];
                }
                if (q > 1.0) continue;
                for (int i = 0; i < d; ++i) p[i] = dom.center[i] + dom.radius * p[i];
            } else {
                for (int i = 0; i < d; ++i) p[i] = dom.lo[i] + (dom.hi[i] - dom.lo[i]) * u01(rng);
            }
            for (int i = 0; i < d; ++i) x[j * d + i] = p[i];
            break;
        }
    }
    return x;
}

}  // namespace

MinProblem MinProblem::short_range(Domain dom) {
    MinProblem p;
    p.kind = Kind::shortRange;
    p.domain = std::move(dom);
    return p;
}

MinProblem MinProblem::jellium(Domain dom, double rho_b) {
    MinProblem p;
    p.kind = Kind::jellium;
    p.domain = std::move(dom);
    p.rho_b = rho_b;
    return p;
}

MinProblem MinProblem::periodic(std::shared_ptr<const Lattice> lat, double ell) {
    if (!lat) throw std::invalid_argument("periodic problem requires a lattice");
    MinProblem p;
    p.kind = Kind::periodic;
    // fold ell into the stored lattice once
    int d = lat->dim();
    double b[9];
    for (int i = 0; i < d * d; ++i) b[i] = lat->basis()[i] * ell;
    p.lattice = std::make_shared<Lattice>(Lattice::from_basis(d, b));
    p.ell = ell;
    p.domain = Domain::periodic_cell(p.lattice, 1.0);
    return p;
}

double problem_energy(const MinProblem& problem, const RieszExponent& exp,
                      const std::vector<double>& coords) {
    int d = exp.d;
    int n = static_cast<int>(coords.size()) / d;
    Evaluator ev(problem, exp, n);
    if (problem.kind == MinProblem::Kind::periodic) {
        ev.lattice_scaled = problem.lattice;
        ev.madelung_term = madelung(*problem.lattice, exp.s);
    }
    return ev.energy(coords);
}

MinimizationResult minimize_energy(const MinProblem& problem, int n, const RieszExponent& exp,
                                   const OptimizerSettings& settings) {
    if (n < 1) throw std::invalid_argument("minimize_energy requires n >= 1");
    if (settings.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    int d = exp.d;
    Evaluator ev(problem, exp, n);
    if (problem.kind == MinProblem::Kind::periodic) {
        ev.lattice_scaled = problem.lattice;
        ev.madelung_term = madelung(*problem.lattice, exp.s);
    }

    MinimizationResult best;
    bool have_best = false;

    for (int restart = 0; restart < settings.restarts; ++restart) {
        std::mt19937_64 rng(settings.seed * 0x9E3779B97F4A7C15ull + restart);
        std::vector<double> x = initial_points(problem, n, d, restart, rng);
        project_all(problem, n, d, x);
        // nudge coincidences apart
        std::uniform_real_distribution<double> jitter(-1e-6, 1e-6);
        for (int guard = 0; guard < 50 && n >= 2 && min_pair_dist(problem, n, d, x) < 1e-10;
             ++guard) {
            for (double& c : x) c += jitter(rng);
            project_all(problem, n, d, x);
        }

        double f = ev.energy(x);
        std::vector<double> g, xprev, gprev, xtrial;
        ev.gradient(x, g);
        double step = settings.initial_step;
        double pgnorm = 1e300;
        bool converged = false;
        int iter = 0;

        // single free point has zero short-range energy; nothing to do
        bool trivial = (n == 1 && problem.kind == MinProblem::Kind::shortRange);

        for (; iter < settings.max_iterations && !trivial; ++iter) {
            // projected-gradient residual with unit probe step
            pgnorm = 0.0;
            {
                std::vector<double> probe(x);
                for (size_t i = 0; i < probe.size(); ++i) probe[i] -= g[i];
                project_all(problem, n, d, probe);
                for (size_t i = 0; i < probe.size(); ++i)
                    pgnorm = std::max(pgnorm, std::fabs(x[i] - probe[i]));
            }
            if (pgnorm < settings.gradient_tolerance) {
                converged = true;
                break;
            }
            // Barzilai-Borwein step when history is available
            if (!xprev.empty()) {
                double sy = 0.0, yy = 0.0;
                for (size_t i = 0; i < x.size(); ++i) {
                    double sx = x[i] - xprev[i];
                    double yg = g[i] - gprev[i];
                    sy += sx * yg;
                    yy += yg * yg;
                }
                if (sy > 0.0 && yy > 0.0) step = std::clamp(sy / yy, 1e-12, 1e3);
            }
            // backtracking on the projected step
            double fnew = f;
            xtrial = x;
            bool accepted = false;
            double trial_step = step;
            for (int bt = 0; bt < 80; ++bt) {
                for (size_t i = 0; i < x.size(); ++i) xtrial[i] = x[i] - trial_step * g[i];
                project_all(problem, n, d, xtrial);
                if (n < 2 || min_pair_dist(problem, n, d, xtrial) > 1e-10) {
                    fnew = ev.energy(xtrial);
                    if (fnew < f) {
                        accepted = true;
                        break;
                    }
                }
                trial_step *= 0.5;
                if (trial_step < 1e-16) break;
            }
            if (!accepted) break;  // stuck; report with current pgnorm
            xprev = x;
            gprev = g;
            x = xtrial;
            f = fnew;
            ev.gradient(x, g);
        }
        if (trivial) {
            converged = true;
            pgnorm = 0.0;
            f = ev.energy(x);
        }

        if (!have_best || f < best.energy - 1e-15 * std::fabs(best.energy)) {
            have_best = true;
            Domain dom = problem.kind == MinProblem::Kind::periodic
                             ? Domain::periodic_cell(problem.lattice, 1.0)
                             : problem.domain;
            best.configuration = PointConfiguration::create(x, dom);
            best.energy = f;
            best.gradient_norm = pgnorm;
            best.restart_index = restart;
            best.converged = converged;
            best.iterations = iter;
        }
    }
    return best;
}

GrandCanonicalResult minimize_grand_canonical(const MinProblem& problem, double mu,
                                              const RieszExponent& exp, int n_lo, int n_hi,
                                              const OptimizerSettings& settings) {
    if (n_lo < 0 || n_hi < n_lo) throw std::invalid_argument("invalid particle-number range");
    if (problem.kind == MinProblem::Kind::jellium && exp.s <= 0.0)
        throw std::domain_error("no grand-canonical Jellium for s <= 0");
    GrandCanonicalResult out;
    double best = 1e300;
    for (int n = n_lo; n <= n_hi; ++n) {
        double value;
        MinimizationResult res;
        if (n == 0) {
            value = 0.0;
            if (problem.kind == MinProblem::Kind::jellium) {
                JelliumSystem sys(problem.domain, problem.rho_b, exp);
                value = background_self_energy(sys);
            }
            res.energy = value;
            res.converged = true;
            res.configuration = PointConfiguration::create({}, problem.domain);
        } else {
            res = minimize_energy(problem, n, exp, settings);
            value = res.energy;
        }
        value -= mu * n;
        if (value < best - 1e-12 * std::max(1.0, std::fabs(best))) {
            best = value;
            out.n_star = n;
            out.result = res;
        }
    }
    return out;
}

CrystallinityReport crystallinity_report(const PointConfiguration& config,
                                         const PointConfiguration* reference) {
    int n = config.size();
    if (n < 2) throw std::invalid_argument("crystallinity report requires n >= 2");
    int d = config.domain.d;
    bool periodic = config.domain.kind == Domain::Kind::periodicCell;
    const Lattice* lat = periodic ? config.domain.lattice.get() : nullptr;
    double ell = periodic ? config.domain.ell : 1.0;

    auto dist = [&](const double* a, const double* b) {
        if (periodic) {
            double ar[3], br[3];
            for (int i = 0; i < d; ++i) {
                ar[i] = a[i] / ell;
                br[i] = b[i] / ell;
            }
            return lat->min_image_distance(ar, br) * ell;
        }
        double q = 0.0;
        for (int i = 0; i < d; ++i) q += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(q);
    };

    CrystallinityReport rep;
    rep.min_distance = config.min_pair_distance();

    // covering radius: scan a grid of domain points
    int grid = std::max(8, static_cast<int>(std::ceil(std::pow(2048.0, 1.0 / d))));
    double cover = 0.0;
    int total = 1;
    for (int i = 0; i < d; ++i) total *= grid;
    for (int p = 0; p < total; ++p) {
        int rem = p;
        double f[3] = {0, 0, 0};
        for (int i = 0; i < d; ++i) {
            f[i] = (rem % grid + 0.5) / grid;
            rem /= grid;
        }
        double pt[3] = {0, 0, 0};
        if (periodic) {
            for (int i = 0; i < d; ++i) {
                double v = 0.0;
                for (int m = 0; m < d; ++m) v += lat->basis()[i + d * m] * f[m];
                pt[i] = v * ell;
            }
        } else if (config.domain.kind == Domain::Kind::ball) {
            // rejection inside the ball
            double q = 0.0;
            for (int i = 0; i < d; ++i) {
                pt[i] = -1.0 + 2.0 * f[i];
                q += pt[i] * pt[i];
            }
            if (q > 1.0) continue;
            for (int i = 0; i < d; ++i)
                pt[i] = config.domain.center[i] + config.domain.radius * pt[i];
        } else {
            for (int i = 0; i < d; ++i)
                pt[i] = config.domain.lo[i] + (config.domain.hi[i] - config.domain.lo[i]) * f[i];
        }
        double nearest = 1e300;
        for (int j = 0; j < n; ++j) nearest = std::min(nearest, dist(pt, config.point(j)));
        cover = std::max(cover, nearest);
    }
    rep.covering_radius = cover;

    if (reference) {
        if (reference->size() != n)
            throw std::invalid_argument("reference configuration must have matching size");
        // minimum-image displacement a - b
        auto displacement = [&](const double* a, const double* b, double* out) {
            if (!periodic) {
                for (int i = 0; i < d; ++i) out[i] = a[i] - b[i];
                return;
            }
            double f[3] = {0, 0, 0};
            for (int i = 0; i < d; ++i)
                for (int m = 0; m < d; ++m)
                    f[i] += lat->dual_basis()[m + d * i] * (a[m] - b[m]) / ell;
            for (int i = 0; i < d; ++i) f[i] -= std::round(f[i]);
            for (int i = 0; i < d; ++i) {
                out[i] = 0.0;
                for (int m = 0; m < d; ++m) out[i] += lat->basis()[i + d * m] * f[m] * ell;
            }
        };
        // translation-only ICP: assign nearest reference point, re-estimate
        std::vector<double> tau(d, 0.0);
        for (int icp = 0; icp < 64; ++icp) {
            std::vector<double> delta(d, 0.0);
            for (int j = 0; j < n; ++j) {
                double shifted[3] = {0, 0, 0};
                for (int i = 0; i < d; ++i) shifted[i] = config.point(j)[i] - tau[i];
                double bestq = 1e300;
                int bestk = 0;
                for (int k = 0; k < n; ++k) {
                    double r = dist(shifted, reference->point(k));
                    if (r < bestq) {
                        bestq = r;
                        bestk = k;
                    }
                }
                double disp[3] = {0, 0, 0};
                displacement(shifted, reference->point(bestk), disp);
                for (int i = 0; i < d; ++i) delta[i] += disp[i];
            }
            double moved = 0.0;
            for (int i = 0; i < d; ++i) {
                delta[i] /= n;
                tau[i] += delta[i];
                moved = std::max(moved, std::fabs(delta[i]));
            }
            if (moved < 1e-13) break;
        }
        double rms = 0.0;
        for (int j = 0; j < n; ++j) {
            double shifted[3] = {0, 0, 0};
            for (int i = 0; i < d; ++i) shifted[i] = config.point(j)[i] - tau[i];
            double bestq = 1e300;
            for (int k = 0; k < n; ++k) bestq = std::min(bestq, dist(shifted, reference->point(k)));
            rms += bestq * bestq;
        }
        rep.lattice_fit_error = std::sqrt(rms / n);
    }
    return rep;
}

}  // namespace rieszgas
