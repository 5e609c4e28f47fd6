#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rieszgas/quadrature.hpp"
#include "rieszgas/specialfn.hpp"

using namespace rieszgas;

namespace {

// brute-force oracle: Gamma(a,x) by panelled Gauss-Legendre out to where the
// integrand is below 1e-22
double upper_gamma_quadrature(double a, double x) {
    double total = 0.0;
    double left = x;
    std::vector<double> nodes, weights;
    for (int panel = 0; panel < 400; ++panel) {
        double width = std::max(1.0, left * 0.25);
        gauss_legendre_on(40, left, left + width, nodes, weights);
        double part = 0.0;
        for (size_t i = 0; i < nodes.size(); ++i)
            part += weights[i] * std::pow(nodes[i], a - 1.0) * std::exp(-nodes[i]);
        total += part;
        left += width;
        if (std::fabs(part) < 1e-22 && panel > 2) break;
    }
    return total;
}

}  // namespace

TEST_CASE("upper incomplete gamma against quadrature oracle") {
    for (double a : {3.0, 1.5, 0.5, 0.25, -0.5, -1.5, -2.75, -3.0}) {
        for (double x : {0.2, 0.9, 1.7, 3.6, 8.0}) {
            double got = upper_gamma(a, x);
            double want = upper_gamma_quadrature(a, x);
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("upper gamma special values") {
    CHECK(upper_gamma(1.0, 2.5) == doctest::Approx(std::exp(-2.5)).epsilon(1e-14));
    CHECK(upper_gamma(2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    // Gamma(1/2, x) = sqrt(pi) erfc(sqrt(x))
    for (double x : {0.3, 1.0, 4.2}) {
        CHECK(upper_gamma(0.5, x) ==
              doctest::Approx(std::sqrt(M_PI) * std::erfc(std::sqrt(x))).epsilon(1e-13));
    }
    CHECK_THROWS_AS(upper_gamma(0.0, 0.0), std::domain_error);
}

TEST_CASE("E1 against series and continued fraction crossover") {
    // values straddling the x = 1 switch agree with the quadrature oracle
    for (double x : {0.05, 0.5, 0.999, 1.001, 2.0, 10.0}) {
        CHECK(exp_integral_e1(x) == doctest::Approx(upper_gamma_quadrature(1e-14, x)).epsilon(1e-10));
    }
}

TEST_CASE("digamma reference values") {
    const double euler = 0.57721566490153286;
    CHECK(digamma(1.0) == doctest::Approx(-euler).epsilon(1e-13));
    CHECK(digamma(2.0) == doctest::Approx(1.0 - euler).epsilon(1e-13));
    // psi(1/2) = -gamma - 2 log 2
    CHECK(digamma(0.5) == doctest::Approx(-euler - 2.0 * std::log(2.0)).epsilon(1e-13));
    // recurrence psi(x+1) = psi(x) + 1/x
    for (double x : {0.3, 1.7, 5.5}) {
        CHECK(digamma(x + 1.0) == doctest::Approx(digamma(x) + 1.0 / x).epsilon(1e-13));
    }
}

TEST_CASE("Gauss-Legendre integrates polynomials and smooth functions") {
    std::vector<double> x, w;
    gauss_legendre_on(8, 0.0, 1.0, x, w);
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], 15);  // degree 2n-1
    CHECK(s == doctest::Approx(1.0 / 16).epsilon(1e-14));

    gauss_legendre_on(32, 0.0, M_PI, x, w);
    s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += w[i] * std::sin(x[i]);
    CHECK(s == doctest::Approx(2.0).epsilon(1e-14));

    // weights positive, symmetric nodes
    const auto& rule = gauss_legendre(64);
    for (int i = 0; i < 64; ++i) {
        CHECK(rule.weights[i] > 0.0);
        CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[63 - i]).epsilon(1e-14));
    }
}
