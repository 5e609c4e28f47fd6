#include "rieszgas/specialfn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rieszgas {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;

// Regularized lower series: gamma(a,x) = x^a e^{-x} sum_n x^n / (a (a+1) ... (a+n)).
double lower_gamma_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x));
}

// Continued fraction for Gamma(a,x), reliable for x > a + 1 (Lentz).
double upper_gamma_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-17) break;
    }
    return std::exp(-x + a * std::log(x)) * h;
}

}  // namespace

double exp_integral_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("exp_integral_e1: x must be positive");
    if (x <= 1.0) {
        // E_1(x) = -gamma - log x + sum_{n>=1} (-1)^{n+1} x^n / (n n!)
        double sum = 0.0, term = 1.0;
        for (int n = 1; n < 60; ++n) {
            term *= -x / n;
            double add = -term / n;
            sum += add;
            if (std::fabs(add) < 1e-18) break;
        }
        return -kEulerGamma - std::log(x) + sum;
    }
    // Lentz continued fraction: E_1(x) = e^{-x} / (x + 1/(1 + 1/(x + 2/(1 + ...))))
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 300; ++i) {
        double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-17) break;
    }
    return std::exp(-x) * h;
}

double upper_gamma(double a, double x) {
    if (x < 0.0) throw std::domain_error("upper_gamma: x must be >= 0");
    if (x == 0.0) {
        if (a <= 0.0) throw std::domain_error("upper_gamma: pole at x = 0 for a <= 0");
        return std::tgamma(a);
    }
    if (a > 0.0) {
        if (x < a + 1.0) return std::tgamma(a) - lower_gamma_series(a, x);
        return upper_gamma_cf(a, x);
    }
    // Nonpositive integer a: recurse down from E_1.
    double n_int = std::round(a);
    if (std::fabs(a - n_int) < 1e-12 && n_int <= 0.0) {
        double g = exp_integral_e1(x);
        double ex = std::exp(-x);
        for (double b = 0.0; b > n_int; b -= 1.0) {
            // Gamma(b-1,x) = (Gamma(b,x) - x^{b-1} e^{-x}) / (b-1)
            g = (g - std::pow(x, b - 1.0) * ex) / (b - 1.0);
        }
        return g;
    }
    // Negative non-integer a: start from the fractional part in (0,1].
    int m = static_cast<int>(std::ceil(-a));
    double a0 = a + m;  // in (0, 1]
    double g = upper_gamma(a0, x);
    double ex = std::exp(-x);
    for (int k = 0; k < m; ++k) {
        double b = a0 - k;  // current parameter, recurrence gives b-1
        g = (g - std::pow(x, b - 1.0) * ex) / (b - 1.0);
    }
    return g;
}

double digamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma: x must be positive");
    double result = 0.0;
    while (x < 12.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    // asymptotic series
    double inv = 1.0 / x, inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12 -
                      inv2 * (1.0 / 120 -
                              inv2 * (1.0 / 252 -
                                      inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * 691.0 / 32760)))));
    return result;
}

}  // namespace rieszgas
