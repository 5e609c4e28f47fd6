#include "rieszgas/jellium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rieszgas/errors.hpp"
#include "rieszgas/quadrature.hpp"

namespace rieszgas {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sphere_area(int d) {  // |S^{d-1}|
    return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

// antiderivative of V_s on the half line, odd-extended:
// G(u) = int_0^u V_s(t) dt for u >= 0, G(-u) = -G(u).
// Then int_a^b V_s(|x-y|) dy = G(x-a) - G(x-b).
double potential_primitive(double s, double u) {
    double sign = u < 0.0 ? -1.0 : 1.0;
    double a = std::fabs(u);
    if (a == 0.0) return 0.0;
    if (s == 0.0) return sign * a * (1.0 - std::log(a));
    if (s >= 1.0) throw std::domain_error("1D background integral diverges for s >= 1");
    // covers s < 0 as well: V_s = -|t|^{|s|} integrates to -a^{1+|s|}/(1+|s|)
    double val = std::pow(a, 1.0 - s) / (1.0 - s);
    return sign * (s < 0.0 ? -val : val);
}

// radial factor int_0^1 t^{d-1} V_s(t c) dt of the Duffy pyramids
double duffy_radial(int d, double s, double c) {
    if (s == 0.0) return 1.0 / (d * d) - std::log(c) / d;
    double val = std::pow(c, -s) / (d - s);
    return s < 0.0 ? -val : val;
}

// same for the gradient kernel: [int_0^1 t^{d-1} V_s'(t c) dt] / c;
// finite only for s < d - 1
double duffy_radial_grad(int d, double s, double c) {
    if (s == 0.0) return -std::pow(c, -2.0) / (d - 1.0);
    if (s > 0.0) return -s * std::pow(c, -s - 2.0) / (d - 1.0 - s);
    return s * std::pow(c, -s - 2.0) / (d - 1.0 - s);
}

struct CornerExtents {
    double h[3];
};

// Integral of V_s(|M tau|) over the box prod_i [-neg_i, pos_i] containing the
// origin, by corner/pyramid (Duffy) decomposition; M column-major or null for
// the identity. nq controls the (d-1)-dim Gauss rule.
double corner_box_integral(int d, double s, const double* neg, const double* pos,
                           const double* M, int nq, bool gradient = false,
                           double* grad_out = nullptr) {
    const auto& rule = gauss_legendre(nq);
    std::vector<double> un(nq), uw(nq);
    for (int i = 0; i < nq; ++i) {
        un[i] = 0.5 * (rule.nodes[i] + 1.0);
        uw[i] = 0.5 * rule.weights[i];
    }
    auto metric_norm = [&](const double* v) {
        if (!M) {
            double q = 0.0;
            for (int i = 0; i < d; ++i) q += v[i] * v[i];
            return std::sqrt(q);
        }
        double q = 0.0;
        for (int r = 0; r < d; ++r) {
            double comp = 0.0;
            for (int c = 0; c < d; ++c) comp += M[r + d * c] * v[c];
            q += comp * comp;
        }
        return std::sqrt(q);
    };

    double total = 0.0;
    if (grad_out) grad_out[0] = grad_out[1] = grad_out[2] = 0.0;
    int corners = 1 << d;
    for (int cbit = 0; cbit < corners; ++cbit) {
        double h[3], sigma[3];
        double prod = 1.0;
        bool degenerate = false;
        for (int i = 0; i < d; ++i) {
            sigma[i] = (cbit >> i) & 1 ? 1.0 : -1.0;
            h[i] = sigma[i] > 0 ? pos[i] : neg[i];
            if (h[i] <= 0.0) degenerate = true;
            prod *= h[i];
        }
        if (degenerate) continue;

        for (int axis = 0; axis < d; ++axis) {
            // u-grid over the remaining d-1 axes
            int o1 = (axis + 1) % d, o2 = (axis + 2) % d;
            if (d == 1) {
                double v[3] = {h[0] * sigma[0], 0, 0};
                double c = metric_norm(v);
                if (!gradient) total += prod * duffy_radial(d, s, c);
                if (grad_out) grad_out[0] += prod * duffy_radial_grad(d, s, c) * v[0];
                break;  // single pyramid in 1D
            }
            if (d == 2) {
                for (int iu = 0; iu < nq; ++iu) {
                    double v[3] = {0, 0, 0};
                    v[axis] = h[axis] * sigma[axis];
                    v[o1] = h[o1] * un[iu] * sigma[o1];
                    double c = metric_norm(v);
                    if (!gradient) total += prod * uw[iu] * duffy_radial(d, s, c);
                    if (grad_out) {
                        double g = duffy_radial_grad(d, s, c);
                        grad_out[0] += prod * uw[iu] * g * v[0];
                        grad_out[1] += prod * uw[iu] * g * v[1];
                    }
                }
            } else {
                for (int iu = 0; iu < nq; ++iu) {
                    for (int ju = 0; ju < nq; ++ju) {
                        double v[3] = {0, 0, 0};
                        v[axis] = h[axis] * sigma[axis];
                        v[o1] = h[o1] * un[iu] * sigma[o1];
                        v[o2] = h[o2] * un[ju] * sigma[o2];
                        double c = metric_norm(v);
                        double w = prod * uw[iu] * uw[ju];
                        if (!gradient) total += w * duffy_radial(d, s, c);
                        if (grad_out) {
                            double g = duffy_radial_grad(d, s, c);
                            for (int k = 0; k < 3; ++k) grad_out[k] += w * g * v[k];
                        }
                    }
                }
            }
        }
    }
    return total;
}

double bp_interval(double s, double a, double b, double x) {
    return potential_primitive(s, x - a) - potential_primitive(s, x - b);
}

// ball background for d >= 2: analytic inner ball plus a 1D cap integral
double bp_ball(int d, double s, double R, double r, int nq) {
    double area = sphere_area(d);
    // area * int_0^L rho^{d-1} V_s(rho) drho
    auto inner_ball = [&](double L) {
        if (L <= 0.0) return 0.0;
        if (s == 0.0) return area * std::pow(L, d) * (1.0 - d * std::log(L)) / (d * d);
        double val = area * std::pow(L, d - s) / (d - s);
        return s < 0.0 ? -val : val;
    };

    double inner = inner_ball(std::max(R - r, 0.0));
    if (r < 1e-14) return inner;

    // measure of directions w with |x + rho w - center| <= R
    auto cap = [&](double rho) {
        double mu = (R * R - r * r - rho * rho) / (2.0 * rho * r);
        mu = std::clamp(mu, -1.0, 1.0);
        if (d == 2) return 2.0 * (kPi - std::acos(mu));
        return 2.0 * kPi * (1.0 + mu);
    };
    double lo = std::max(R - r, 0.0), hi = R + r;
    double total = inner;
    // graded panels toward rho = 0 when x sits on the boundary
    std::vector<double> edges;
    if (lo <= 1e-14) {
        edges.push_back(0.0);
        double e = hi * 1e-8;
        while (e < hi) {
            edges.push_back(e);
            e *= 4.0;
        }
        edges.push_back(hi);
    } else {
        edges = {lo, hi};
    }
    std::vector<double> xs, ws;
    for (size_t p = 0; p + 1 < edges.size(); ++p) {
        gauss_legendre_on(nq, edges[p], edges[p + 1], xs, ws);
        for (int i = 0; i < nq; ++i) {
            double rho = xs[i];
            double v = (s == 0.0) ? -std::log(rho)
                                  : (s < 0.0 ? -std::pow(rho, -s) : std::pow(rho, -s));
            total += ws[i] * std::pow(rho, d - 1) * cap(rho) * v;
        }
    }
    return total;
}

// plain tensor Gauss-Legendre integral of V_s(|w - B t|)*|Q| over t in [-1/2,1/2]^d,
// for cells whose singular point lies well outside
double cell_integral_far(const Lattice& lat, double s, const double* w, int nq, int split) {
    int d = lat.dim();
    const double* B = lat.basis();
    const auto& rule = gauss_legendre(nq);
    double total = 0.0;
    double h = 1.0 / split;
    std::vector<double> nodes(nq), weights(nq);
    for (int i = 0; i < nq; ++i) {
        nodes[i] = 0.5 * rule.nodes[i];
        weights[i] = 0.5 * rule.weights[i];
    }
    int cells = 1;
    for (int i = 0; i < d; ++i) cells *= split;
    for (int cell = 0; cell < cells; ++cell) {
        int idx[3] = {0, 0, 0};
        int tmp = cell;
        for (int i = 0; i < d; ++i) {
            idx[i] = tmp % split;
            tmp /= split;
        }
        double base[3];
        for (int i = 0; i < d; ++i) base[i] = -0.5 + (idx[i] + 0.5) * h;
        // tensor loop
        int pts = 1;
        for (int i = 0; i < d; ++i) pts *= nq;
        for (int p = 0; p < pts; ++p) {
            int q = p;
            double t[3] = {0, 0, 0};
            double wgt = 1.0;
            for (int i = 0; i < d; ++i) {
                int k = q % nq;
                q /= nq;
                t[i] = base[i] + nodes[k] * h;
                wgt *= weights[k] * h;
            }
            double diff[3] = {0, 0, 0};
            for (int r = 0; r < d; ++r) {
                double comp = 0.0;
                for (int c = 0; c < d; ++c) comp += B[r + d * c] * t[c];
                diff[r] = w[r] - comp;
            }
            double rr = 0.0;
            for (int r = 0; r < d; ++r) rr += diff[r] * diff[r];
            total += wgt * potential_value(s, std::sqrt(rr));
        }
    }
    return total * lat.covolume();
}

// int over one lattice cell (centred parallelepiped at z=0) of V_s(|w - y|) dy
double cell_integral(const Lattice& lat, double s, const double* w, int nq) {
    int d = lat.dim();
    double tstar[3] = {0, 0, 0};
    // fractional coordinates of w
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) tstar[i] += lat.dual_basis()[j + d * i] * w[j];
    double maxf = 0.0;
    for (int i = 0; i < d; ++i) maxf = std::max(maxf, std::fabs(tstar[i]));
    if (maxf <= 0.5) {
        // singularity inside: Duffy around tau = 0 over [t*-1/2, t*+1/2]^d
        double neg[3], pos[3];
        for (int i = 0; i < d; ++i) {
            pos[i] = tstar[i] + 0.5;
            neg[i] = 0.5 - tstar[i];
        }
        return lat.covolume() *
               corner_box_integral(d, s, neg, pos, lat.basis(), nq);
    }
    if (maxf <= 1.6) return cell_integral_far(lat, s, w, std::max(nq, 8), 3);
    if (maxf <= 6.0) return cell_integral_far(lat, s, w, 6, 1);
    return cell_integral_far(lat, s, w, 5, 1);
}

}  // namespace

JelliumSystem::JelliumSystem(Domain dom, double rho, RieszExponent e)
    : domain(std::move(dom)), rho_b(rho), exp(e) {
    if (!(rho_b > 0.0)) throw std::invalid_argument("background density must be positive");
    if (domain.d != exp.d) throw std::invalid_argument("domain/exponent dimension mismatch");
}

double background_potential(const JelliumSystem& sys, const double* x,
                            const QuadratureSettings& q) {
    const Domain& dom = sys.domain;
    double s = sys.exp.s;
    int d = dom.d;
    if (q.nodes_per_axis < 8) throw std::invalid_argument("quadrature needs >= 8 nodes per axis");
    if (!dom.contains(x, 1e-9)) throw std::domain_error("background potential: x outside the domain");
    if (s >= d) throw std::domain_error("background integral diverges for s >= d");

    switch (dom.kind) {
        case Domain::Kind::interval:
            return bp_interval(s, dom.lo[0], dom.hi[0], x[0]);
        case Domain::Kind::box: {
            double neg[3], pos[3];
            for (int i = 0; i < d; ++i) {
                neg[i] = x[i] - dom.lo[i];
                pos[i] = dom.hi[i] - x[i];
            }
            int nq = std::min(q.nodes_per_axis, 48);
            return corner_box_integral(d, s, neg, pos, nullptr, nq);
        }
        case Domain::Kind::ball: {
            double r = 0.0;
            for (int i = 0; i < d; ++i) r += (x[i] - dom.center[i]) * (x[i] - dom.center[i]);
            r = std::sqrt(r);
            if (d == 1) return bp_interval(s, dom.center[0] - dom.radius,
                                           dom.center[0] + dom.radius, x[0]);
            return bp_ball(d, s, dom.radius, std::min(r, dom.radius),
                           std::min(q.nodes_per_axis, 48));
        }
        case Domain::Kind::periodicCell:
            throw std::invalid_argument("background potential is not defined on a torus");
    }
    throw std::logic_error("unreachable");
}

std::array<double, 3> background_potential_gradient(const JelliumSystem& sys, const double* x,
                                                    const QuadratureSettings& q) {
    const Domain& dom = sys.domain;
    double s = sys.exp.s;
    int d = dom.d;
    std::array<double, 3> g{0, 0, 0};
    if (dom.kind == Domain::Kind::interval ||
        (dom.kind == Domain::Kind::ball && d == 1)) {
        double a = dom.kind == Domain::Kind::interval ? dom.lo[0] : dom.center[0] - dom.radius;
        double b = dom.kind == Domain::Kind::interval ? dom.hi[0] : dom.center[0] + dom.radius;
        // d/dx [G(x-a) - G(x-b)]; G' is even: V_s(|u|)
        double va = (x[0] - a == 0.0) ? 0.0 : potential_value(s, std::fabs(x[0] - a));
        double vb = (b - x[0] == 0.0) ? 0.0 : potential_value(s, std::fabs(x[0] - b));
        g[0] = va - vb;
        return g;
    }
    if (dom.kind == Domain::Kind::box && s < d - 1) {
        // substitute w = x - y: the region is [x-hi, x-lo], so the positive
        // extents are x - lo (the integrand is odd, orientation matters)
        double neg[3], pos[3];
        for (int i = 0; i < d; ++i) {
            pos[i] = x[i] - dom.lo[i];
            neg[i] = dom.hi[i] - x[i];
        }
        int nq = std::min(q.nodes_per_axis, 48);
        double grad[3];
        corner_box_integral(d, s, neg, pos, nullptr, nq, true, grad);
        for (int i = 0; i < d; ++i) g[i] = grad[i];
        return g;
    }
    // fallback: central differences of the potential
    double h = 1e-6;
    for (int i = 0; i < d; ++i) {
        double xp[3] = {x[0], x[1], x[2]}, xm[3] = {x[0], x[1], x[2]};
        xp[i] += h;
        xm[i] -= h;
        dom.project(xp);
        dom.project(xm);
        double denom = xp[i] - xm[i];
        if (denom <= 0.0) continue;
        g[i] = (background_potential(sys, xp, q) - background_potential(sys, xm, q)) / denom;
    }
    return g;
}

double background_self_energy(const JelliumSystem& sys, const QuadratureSettings& q) {
    const Domain& dom = sys.domain;
    double s = sys.exp.s;
    int d = dom.d;
    double pref = 0.5 * sys.rho_b * sys.rho_b;
    if (dom.kind == Domain::Kind::interval ||
        (dom.kind == Domain::Kind::ball && d == 1)) {
        double L = dom.kind == Domain::Kind::interval ? dom.hi[0] - dom.lo[0] : 2.0 * dom.radius;
        if (s >= 1.0) throw std::domain_error("1D self-energy diverges for s >= 1");
        double val;
        if (s == 0.0) {
            val = L * L * (1.5 - std::log(L));
        } else {
            val = 2.0 * std::pow(L, 2.0 - s) / ((1.0 - s) * (2.0 - s));
            if (s < 0.0) val = -val;
        }
        return pref * val;
    }
    if (dom.kind == Domain::Kind::ball) {
        // radial outer integral of the background potential
        double prev = 0.0;
        int nq = std::max(q.nodes_per_axis / 2, 16);
        for (int level = 0; level <= q.max_refinements; ++level) {
            std::vector<double> xs, ws;
            gauss_legendre_on(nq, 0.0, dom.radius, xs, ws);
            double total = 0.0;
            for (int i = 0; i < nq; ++i)
                total += ws[i] * std::pow(xs[i], d - 1) * bp_ball(d, s, dom.radius, xs[i], 32);
            total *= sphere_area(d);
            if (level > 0 && std::fabs(total - prev) <= q.rel_tolerance * std::fabs(total))
                return pref * total;
            prev = total;
            nq *= 2;
        }
        throw convergence_error("ball self-energy quadrature did not converge");
    }
    if (dom.kind == Domain::Kind::box) {
        // autocorrelation reduction: the double integral collapses to
        //   2^d int_{[0,L]^d} V_s(|w|) prod_i (L_i - w_i) dw,
        // which the corner/pyramid substitution evaluates with the polynomial
        // weight expanded in powers of the radial variable.
        double L[3];
        for (int i = 0; i < d; ++i) L[i] = dom.hi[i] - dom.lo[i];
        int nq = std::min(std::max(q.nodes_per_axis, 24), 48);
        const auto& rule = gauss_legendre(nq);
        std::vector<double> un(nq), uw(nq);
        for (int i = 0; i < nq; ++i) {
            un[i] = 0.5 * (rule.nodes[i] + 1.0);
            uw[i] = 0.5 * rule.weights[i];
        }
        double prodL = 1.0;
        for (int i = 0; i < d; ++i) prodL *= L[i];

        // int_0^1 t^{d-1+k} V_s(t c) dt per power k of the weight polynomial
        auto radial_k = [&](int k, double c) {
            int dk = d + k;
            if (s == 0.0) return 1.0 / (dk * dk) - std::log(c) / dk;
            double val = std::pow(c, -s) / (dk - s);
            return s < 0.0 ? -val : val;
        };
        auto pyramid_term = [&](const double* v) {
            // expand prod_j (L_j - t v_j) in powers of t
            double poly[4] = {1.0, 0.0, 0.0, 0.0};
            for (int j = 0; j < d; ++j) {
                double next[4] = {0, 0, 0, 0};
                for (int k = 0; k <= j; ++k) {
                    next[k] += poly[k] * L[j];
                    next[k + 1] -= poly[k] * v[j];
                }
                for (int k = 0; k <= j + 1; ++k) poly[k] = next[k];
            }
            double c = 0.0;
            for (int j = 0; j < d; ++j) c += v[j] * v[j];
            c = std::sqrt(c);
            double sum = 0.0;
            for (int k = 0; k <= d; ++k) sum += poly[k] * radial_k(k, c);
            return sum;
        };

        double total = 0.0;
        for (int axis = 0; axis < d; ++axis) {
            if (d == 1) {
                double v[3] = {L[0], 0, 0};
                total += pyramid_term(v);
            } else if (d == 2) {
                int o1 = (axis + 1) % 2;
                for (int iu = 0; iu < nq; ++iu) {
                    double v[3] = {0, 0, 0};
                    v[axis] = L[axis];
                    v[o1] = L[o1] * un[iu];
                    total += uw[iu] * pyramid_term(v);
                }
            } else {
                int o1 = (axis + 1) % 3, o2 = (axis + 2) % 3;
                for (int iu = 0; iu < nq; ++iu) {
                    for (int ju = 0; ju < nq; ++ju) {
                        double v[3] = {0, 0, 0};
                        v[axis] = L[axis];
                        v[o1] = L[o1] * un[iu];
                        v[o2] = L[o2] * un[ju];
                        total += uw[iu] * uw[ju] * pyramid_term(v);
                    }
                }
            }
        }
        return pref * std::pow(2.0, d) * prodL * total;
    }
    throw std::invalid_argument("self-energy is not defined on a torus");
}

double jellium_energy(const JelliumSystem& sys, const PointConfiguration& config,
                      const QuadratureSettings& q) {
    int n = config.size();
    double s = sys.exp.s;
    if (s <= 0.0) {
        double target = sys.rho_b * sys.domain.volume();
        if (std::fabs(n - target) > 1e-9)
            throw std::domain_error("jellium energy requires neutrality N = rho_b |Omega| for s <= 0");
    }
    double e = riesz_energy(config, sys.exp);
    for (int j = 0; j < n; ++j) e -= sys.rho_b * background_potential(sys, config.point(j), q);
    return e + background_self_energy(sys, q);
}

double jellium_energy_1d_coulomb(const PointConfiguration& config, int n) {
    if (config.domain.d != 1 || config.domain.kind != Domain::Kind::interval)
        throw std::domain_error("closed form requires the interval [-N/2, N/2]");
    if (config.size() != n) throw std::invalid_argument("configuration size differs from N");
    if (std::fabs(config.domain.lo[0] + 0.5 * n) > 1e-9 ||
        std::fabs(config.domain.hi[0] - 0.5 * n) > 1e-9)
        throw std::domain_error("closed form requires the interval [-N/2, N/2]");
    std::vector<double> xs(config.coords);
    std::sort(xs.begin(), xs.end());
    double e = n / 12.0;
    for (int j = 1; j <= n; ++j) {
        double t = xs[j - 1] - j + 0.5 * (n + 1);
        e += t * t;
    }
    return e;
}

double ball_domain_overlap(const Domain& domain, const double* tau, double r) {
    int d = domain.d;
    if (domain.kind == Domain::Kind::interval) {
        double lo = std::max(domain.lo[0], tau[0] - r);
        double hi = std::min(domain.hi[0], tau[0] + r);
        return std::max(hi - lo, 0.0);
    }
    if (domain.kind == Domain::Kind::periodicCell) {
        // windows are assumed small against the cell; treat as free space
        const double pi = kPi;
        return d == 1 ? 2.0 * r : d == 2 ? pi * r * r : 4.0 / 3.0 * pi * r * r * r;
    }
    // common fast path: the ball lies entirely inside the domain
    {
        bool inside = true;
        if (domain.kind == Domain::Kind::box) {
            for (int i = 0; i < d; ++i)
                inside = inside && tau[i] - r >= domain.lo[i] && tau[i] + r <= domain.hi[i];
        } else {
            double q = 0.0;
            for (int i = 0; i < d; ++i) q += (tau[i] - domain.center[i]) * (tau[i] - domain.center[i]);
            inside = std::sqrt(q) + r <= domain.radius;
        }
        if (inside) {
            const double pi = kPi;
            return d == 1 ? 2.0 * r : d == 2 ? pi * r * r : 4.0 / 3.0 * pi * r * r * r;
        }
    }
    // recursive subdivision on the bounding box of the ball
    struct Rec {
        static double go(const Domain& dom, const double* tau, double r, const double* lo,
                         const double* hi, int depth) {
            int d = dom.d;
            double vol = 1.0;
            for (int i = 0; i < d; ++i) vol *= hi[i] - lo[i];
            if (vol <= 0.0) return 0.0;
            // corner classification against ball and domain
            double nearest = 0.0, farthest = 0.0;
            for (int i = 0; i < d; ++i) {
                double a = lo[i] - tau[i], b = hi[i] - tau[i];
                double mn = (a <= 0.0 && b >= 0.0) ? 0.0 : std::min(std::fabs(a), std::fabs(b));
                double mx = std::max(std::fabs(a), std::fabs(b));
                nearest += mn * mn;
                farthest += mx * mx;
            }
            bool in_ball = farthest <= r * r;
            bool out_ball = nearest > r * r;
            if (out_ball) return 0.0;
            // against the domain box/ball
            bool cell_in_domain = true;
            for (int i = 0; i < d && dom.kind == Domain::Kind::box; ++i)
                cell_in_domain = cell_in_domain && lo[i] >= dom.lo[i] - 1e-15 &&
                                 hi[i] <= dom.hi[i] + 1e-15;
            if (dom.kind == Domain::Kind::ball) {
                double far2 = 0.0;
                for (int i = 0; i < d; ++i) {
                    double a = lo[i] - dom.center[i], b = hi[i] - dom.center[i];
                    double mx = std::max(std::fabs(a), std::fabs(b));
                    far2 += mx * mx;
                }
                cell_in_domain = far2 <= dom.radius * dom.radius;
            }
            if (in_ball && cell_in_domain) return vol;
            if (depth == 0) {
                // measure-zero-ish boundary layer: midpoint test
                double mid[3] = {0, 0, 0};
                for (int i = 0; i < d; ++i) mid[i] = 0.5 * (lo[i] + hi[i]);
                double q = 0.0;
                for (int i = 0; i < d; ++i) q += (mid[i] - tau[i]) * (mid[i] - tau[i]);
                return (q <= r * r && dom.contains(mid, 0.0)) ? vol : 0.0;
            }
            // split widest axis
            int axis = 0;
            for (int i = 1; i < d; ++i)
                if (hi[i] - lo[i] > hi[axis] - lo[axis]) axis = i;
            double lo2[3] = {lo[0], lo[1], lo[2]}, hi2[3] = {hi[0], hi[1], hi[2]};
            double mid = 0.5 * (lo[axis] + hi[axis]);
            hi2[axis] = mid;
            double left = go(dom, tau, r, lo2, hi2, depth - 1);
            lo2[axis] = mid;
            hi2[axis] = hi[axis];
            double right = go(dom, tau, r, lo2, hi2, depth - 1);
            return left + right;
        }
    };
    double lo[3], hi[3];
    for (int i = 0; i < d; ++i) {
        lo[i] = tau[i] - r;
        hi[i] = tau[i] + r;
    }
    return Rec::go(domain, tau, r, lo, hi, 10 * d);
}

double discrepancy(const PointConfiguration& config, const double* tau, double r,
                   double rho_b, const Domain& domain) {
    if (!(r > 0.0)) throw std::invalid_argument("discrepancy requires r > 0");
    int d = domain.d;
    int count = 0;
    bool periodic = domain.kind == Domain::Kind::periodicCell;
    for (int i = 0; i < config.size(); ++i) {
        double dist;
        if (periodic) {
            double a[3], b[3];
            for (int k = 0; k < d; ++k) {
                a[k] = config.point(i)[k] / domain.ell;
                b[k] = tau[k] / domain.ell;
            }
            dist = domain.lattice->min_image_distance(a, b) * domain.ell;
        } else {
            double q = 0.0;
            for (int k = 0; k < d; ++k) {
                double dd = config.point(i)[k] - tau[k];
                q += dd * dd;
            }
            dist = std::sqrt(q);
        }
        if (dist <= r) ++count;
    }
    const double pi = kPi;
    double ball = d == 1 ? 2.0 * r : d == 2 ? pi * r * r : 4.0 / 3.0 * pi * r * r * r;
    double overlap = ball_domain_overlap(domain, tau, r);
    return (count - rho_b * overlap) / ball;
}

ShiftCheck sharp_background_shift(const Lattice& lat, double s, const double* x, double R,
                                  const QuadratureSettings& q) {
    int d = lat.dim();
    if (!(s >= d - 2.0 && s < d))
        throw std::domain_error("sharp-background check requires d-2 <= s < d");
    bool coulomb = std::fabs(s - (d - 2.0)) < 1e-12;
    if (coulomb && d != 3)
        throw std::domain_error("the s = d-2 quadrupole branch is implemented for d = 3 cells");
    const double* B = lat.basis();
    if (coulomb) {
        // no-quadrupole condition: B B^T proportional to the identity
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                double bb = 0.0, diag = 0.0;
                for (int k = 0; k < d; ++k) {
                    bb += B[i + d * k] * B[j + d * k];
                    diag += B[0 + d * k] * B[0 + d * k];
                }
                if (i != j && std::fabs(bb) > 1e-12 * diag)
                    throw std::domain_error("s = d-2 requires a cubic-symmetric lattice cell");
                if (i == j && std::fabs(bb - diag) > 1e-12 * diag)
                    throw std::domain_error("s = d-2 requires a cubic-symmetric lattice cell");
            }
        }
    }

    double rho_b = 1.0 / lat.covolume();
    int nq = std::min(std::max(q.nodes_per_axis / 4, 12), 24);
    double truncated = 0.0;
    int shells = static_cast<int>(R / lat.min_vector_norm()) + 2;
    // z = 0 cell first
    {
        double q0 = 0.0;
        for (int i = 0; i < d; ++i) q0 += x[i] * x[i];
        truncated += potential_value(s, std::sqrt(q0)) - rho_b * cell_integral(lat, s, x, nq);
    }
    for_each_lattice_vector(lat, shells, [&](const std::array<double, 3>& z, double zq) {
        if (zq > R * R) return;
        double diff[3] = {0, 0, 0};
        double rr = 0.0;
        for (int i = 0; i < d; ++i) {
            diff[i] = x[i] - z[i];
            rr += diff[i] * diff[i];
        }
        truncated += potential_value(s, std::sqrt(rr)) - rho_b * cell_integral(lat, s, diff, nq);
    });

    double shift = 0.0;
    if (coulomb) {
        // int_cell |y|^2 dy = |Q| * ||B||_F^2 / 12 for the centred parallelepiped;
        // at unit density the shift is (|S^{d-1}|/2d) int_Q |y|^2 dy, and it
        // carries rho_b^2 for general covolume (degree 2-d homogeneity)
        double fro = 0.0;
        for (int i = 0; i < d * d; ++i) fro += B[i] * B[i];
        double cell_moment = lat.covolume() * fro / 12.0;
        shift = sphere_area(d) / (2.0 * d) * cell_moment * rho_b * rho_b;
    }
    ShiftCheck out;
    out.truncated = truncated;
    out.predicted = periodic_potential(lat, s, x) + shift;
    return out;
}

}  // namespace rieszgas
