#include "rieszgas/riesz.hpp"

#include <cmath>
#include <stdexcept>

namespace rieszgas {

RieszExponent::RieszExponent(double s_, int d_) : s(s_), d(d_) {
    if (!(s > -2.0)) throw std::invalid_argument("Riesz exponent requires s > -2");
    if (d < 1 || d > 3) throw std::invalid_argument("spatial dimension must be 1, 2 or 3");
}

Branch RieszExponent::branch() const {
    if (s > d) return Branch::shortRange;
    if (s > 0.0) return Branch::longRangePositive;
    if (s == 0.0) return Branch::logCase;
    return Branch::negative;
}

double potential_value(double s, double r) {
    if (!(r > 0.0)) throw std::domain_error("potential singular at zero separation");
    if (s > 0.0) return std::pow(r, -s);
    if (s == 0.0) return -std::log(r);
    return -std::pow(r, -s);
}

double potential_value(const RieszExponent& exp, double r) { return potential_value(exp.s, r); }

double potential_derivative(double s, double r) {
    if (!(r > 0.0)) throw std::domain_error("potential singular at zero separation");
    if (s > 0.0) return -s * std::pow(r, -s - 1.0);
    if (s == 0.0) return -1.0 / r;
    return s * std::pow(r, -s - 1.0);  // d/dr of -r^{|s|}, s < 0
}

Domain Domain::interval(double a, double b) {
    if (!(b > a)) throw std::invalid_argument("interval requires b > a");
    Domain dom;
    dom.kind = Kind::interval;
    dom.d = 1;
    dom.lo[0] = a;
    dom.hi[0] = b;
    return dom;
}

Domain Domain::box(int d, const double* lo, const double* hi) {
    if (d < 1 || d > 3) throw std::invalid_argument("box dimension must be 1, 2 or 3");
    Domain dom;
    dom.kind = Kind::box;
    dom.d = d;
    for (int i = 0; i < d; ++i) {
        if (!(hi[i] > lo[i])) throw std::invalid_argument("box requires hi > lo");
        dom.lo[i] = lo[i];
        dom.hi[i] = hi[i];
    }
    return dom;
}

Domain Domain::ball(int d, const double* center, double radius) {
    if (d < 1 || d > 3) throw std::invalid_argument("ball dimension must be 1, 2 or 3");
    if (!(radius > 0.0)) throw std::invalid_argument("ball requires radius > 0");
    Domain dom;
    dom.kind = Kind::ball;
    dom.d = d;
    for (int i = 0; i < d; ++i) dom.center[i] = center[i];
    dom.radius = radius;
    return dom;
}

Domain Domain::periodic_cell(std::shared_ptr<const Lattice> lat, double ell) {
    if (!lat) throw std::invalid_argument("periodic cell requires a lattice");
    if (!(ell > 0.0)) throw std::invalid_argument("periodic cell requires ell > 0");
    Domain dom;
    dom.kind = Kind::periodicCell;
    dom.d = lat->dim();
    dom.lattice = std::move(lat);
    dom.ell = ell;
    return dom;
}

double Domain::volume() const {
    switch (kind) {
        case Kind::interval:
            return hi[0] - lo[0];
        case Kind::box: {
            double v = 1.0;
            for (int i = 0; i < d; ++i) v *= hi[i] - lo[i];
            return v;
        }
        case Kind::ball: {
            const double pi = 3.14159265358979323846;
            if (d == 1) return 2.0 * radius;
            if (d == 2) return pi * radius * radius;
            return 4.0 / 3.0 * pi * radius * radius * radius;
        }
        case Kind::periodicCell:
            return std::pow(ell, d) * lattice->covolume();
    }
    return 0.0;
}

bool Domain::contains(const double* x, double pad) const {
    switch (kind) {
        case Kind::interval:
        case Kind::box: {
            for (int i = 0; i < d; ++i)
                if (x[i] < lo[i] - pad || x[i] > hi[i] + pad) return false;
            return true;
        }
        case Kind::ball: {
            double q = 0.0;
            for (int i = 0; i < d; ++i) q += (x[i] - center[i]) * (x[i] - center[i]);
            return std::sqrt(q) <= radius + pad;
        }
        case Kind::periodicCell:
            return true;  // every point has a representative in the cell
    }
    return false;
}

void Domain::project(double* x) const {
    switch (kind) {
        case Kind::interval:
        case Kind::box:
            for (int i = 0; i < d; ++i) x[i] = std::min(std::max(x[i], lo[i]), hi[i]);
            return;
        case Kind::ball: {
            double q = 0.0;
            for (int i = 0; i < d; ++i) q += (x[i] - center[i]) * (x[i] - center[i]);
            double r = std::sqrt(q);
            if (r > radius) {
                for (int i = 0; i < d; ++i)
                    x[i] = center[i] + (x[i] - center[i]) * (radius / r);
            }
            return;
        }
        case Kind::periodicCell: {
            // reduce to the fundamental cell of ell*L
            double y[3] = {0, 0, 0};
            for (int i = 0; i < d; ++i) y[i] = x[i] / ell;
            lattice->reduce(y);
            for (int i = 0; i < d; ++i) x[i] = y[i] * ell;
            return;
        }
    }
}

PointConfiguration PointConfiguration::create(std::vector<double> coords, Domain domain) {
    if (coords.size() % domain.d != 0)
        throw std::invalid_argument("coordinate list length must be a multiple of d");
    PointConfiguration config;
    config.domain = domain;
    config.coords = std::move(coords);
    int n = config.size();
    for (int i = 0; i < n; ++i) {
        double* p = config.coords.data() + i * domain.d;
        if (domain.kind == Domain::Kind::periodicCell) {
            domain.project(p);
        } else if (!domain.contains(p)) {
            throw std::domain_error("point outside the domain");
        }
    }
    if (n >= 2 && config.min_pair_distance() <= 0.0)
        throw std::domain_error("configuration has coincident points");
    return config;
}

double PointConfiguration::min_pair_distance() const {
    int n = size(), d = domain.d;
    double best = 1e300;
    bool periodic = domain.kind == Domain::Kind::periodicCell;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double r;
            if (periodic) {
                double a[3], b[3];
                for (int k = 0; k < d; ++k) {
                    a[k] = point(i)[k] / domain.ell;
                    b[k] = point(j)[k] / domain.ell;
                }
                r = domain.lattice->min_image_distance(a, b) * domain.ell;
            } else {
                double q = 0.0;
                for (int k = 0; k < d; ++k) {
                    double dd = point(i)[k] - point(j)[k];
                    q += dd * dd;
                }
                r = std::sqrt(q);
            }
            best = std::min(best, r);
        }
    }
    return best;
}

double riesz_energy(int d, int n, const double* coords, double s) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double q = 0.0;
            for (int k = 0; k < d; ++k) {
                double dd = coords[i * d + k] - coords[j * d + k];
                q += dd * dd;
            }
            e += potential_value(s, std::sqrt(q));
        }
    }
    return e;
}

double riesz_energy(const PointConfiguration& config, const RieszExponent& exp) {
    if (config.domain.d != exp.d)
        throw std::invalid_argument("exponent dimension does not match the configuration");
    return riesz_energy(config.domain.d, config.size(), config.coords.data(), exp.s);
}

PointConfiguration scale_configuration(const PointConfiguration& config, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("scale factor must be positive");
    PointConfiguration scaled;
    scaled.coords = config.coords;
    for (double& c : scaled.coords) c *= lambda;
    Domain dom = config.domain;
    switch (dom.kind) {
        case Domain::Kind::interval:
        case Domain::Kind::box:
            for (int i = 0; i < dom.d; ++i) {
                dom.lo[i] *= lambda;
                dom.hi[i] *= lambda;
            }
            break;
        case Domain::Kind::ball:
            for (int i = 0; i < dom.d; ++i) dom.center[i] *= lambda;
            dom.radius *= lambda;
            break;
        case Domain::Kind::periodicCell:
            dom.ell *= lambda;
            break;
    }
    scaled.domain = dom;
    return scaled;
}

}  // namespace rieszgas
