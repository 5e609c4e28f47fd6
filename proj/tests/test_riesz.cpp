#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "rieszgas/riesz.hpp"

using namespace rieszgas;

TEST_CASE("potential value branches") {
    CHECK(potential_value(2.0, 2.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(potential_value(0.0, 1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(potential_value(-1.0, 3.0) == doctest::Approx(-3.0).epsilon(1e-15));
    CHECK_THROWS_AS(potential_value(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(potential_value(-1.0, 0.0), std::domain_error);
}

TEST_CASE("potential is strictly decreasing in r in all branches") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rs(0.05, 10.0);
    for (double s : {-1.9, -1.0, -0.25, 0.0, 0.5, 1.0, 3.0, 8.0}) {
        for (int k = 0; k < 200; ++k) {
            double r1 = rs(rng), r2 = rs(rng);
            if (r1 == r2) continue;
            if (r1 > r2) std::swap(r1, r2);
            CHECK(potential_value(s, r1) > potential_value(s, r2));
        }
        // derivative negative
        for (double r : {0.1, 1.0, 7.3}) CHECK(potential_derivative(s, r) < 0.0);
    }
}

TEST_CASE("exponent branch tags") {
    CHECK(RieszExponent(5.0, 3).branch() == Branch::shortRange);
    CHECK(RieszExponent(1.0, 3).branch() == Branch::longRangePositive);
    CHECK(RieszExponent(0.0, 2).branch() == Branch::logCase);
    CHECK(RieszExponent(-1.0, 1).branch() == Branch::negative);
    CHECK_THROWS_AS(RieszExponent(-2.0, 1), std::invalid_argument);
}

TEST_CASE("riesz energy simple values") {
    // two points at distance 1, s = 1
    auto dom = Domain::interval(0.0, 1.0);
    auto cfg = PointConfiguration::create({0.0, 1.0}, dom);
    CHECK(riesz_energy(cfg, RieszExponent(1.0, 1)) == doctest::Approx(1.0).epsilon(1e-15));

    // collinear 0,1,2 at s=2: 1 + 1 + 1/4
    auto dom2 = Domain::interval(0.0, 2.0);
    auto cfg2 = PointConfiguration::create({0.0, 1.0, 2.0}, dom2);
    CHECK(riesz_energy(cfg2, RieszExponent(2.0, 1)) == doctest::Approx(2.25).epsilon(1e-15));

    // empty and single-point configurations carry zero energy
    CHECK(riesz_energy(PointConfiguration::create({}, dom), RieszExponent(2.0, 1)) == 0.0);
    CHECK(riesz_energy(PointConfiguration::create({0.5}, dom), RieszExponent(2.0, 1)) == 0.0);

    CHECK_THROWS_AS(PointConfiguration::create({0.3, 0.3}, dom), std::domain_error);
    CHECK_THROWS_AS(PointConfiguration::create({0.3, 1.7}, dom), std::domain_error);
}

TEST_CASE("permutation and translation invariance") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double lo[2] = {-20.0, -20.0}, hi[2] = {20.0, 20.0};
    auto dom = Domain::box(2, lo, hi);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 6;
        std::vector<double> pts(2 * n);
        for (double& c : pts) c = u(rng) * 4.0;
        double e1 = riesz_energy(2, n, pts.data(), 1.5);

        // permute points
        std::vector<double> perm(pts);
        std::swap_ranges(perm.begin(), perm.begin() + 2, perm.begin() + 2 * (n - 1));
        double e2 = riesz_energy(2, n, perm.data(), 1.5);
        CHECK(e2 == doctest::Approx(e1).epsilon(1e-15));

        // translate
        std::vector<double> shift(pts);
        for (int i = 0; i < n; ++i) {
            shift[2 * i] += 3.7;
            shift[2 * i + 1] -= 1.2;
        }
        double e3 = riesz_energy(2, n, shift.data(), 1.5);
        CHECK(e3 == doctest::Approx(e1).epsilon(1e-12));
        (void)dom;
    }
}

TEST_CASE("scaling homogeneity") {
    auto dom = Domain::interval(0.0, 1.0);
    auto cfg = PointConfiguration::create({0.0, 1.0}, dom);

    // lambda = 1 identity
    auto same = scale_configuration(cfg, 1.0);
    CHECK(same.coords == cfg.coords);

    // s=2, lambda=2: energy 1/4
    auto doubled = scale_configuration(cfg, 2.0);
    CHECK(riesz_energy(doubled, RieszExponent(2.0, 1)) == doctest::Approx(0.25).epsilon(1e-15));

    // random configs: E(lambda X) = lambda^{-s} E(X) for s != 0
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double s : {-1.5, -0.5, 0.7, 2.0, 5.0}) {
        std::vector<double> pts;
        for (int i = 0; i < 5; ++i) pts.push_back(u(rng));
        auto c = PointConfiguration::create(pts, dom);
        for (double lam : {0.3, 2.0, 9.5}) {
            auto sc = scale_configuration(c, lam);
            double want = std::pow(lam, -s) * riesz_energy(c, RieszExponent(s, 1));
            CHECK(riesz_energy(sc, RieszExponent(s, 1)) ==
                  doctest::Approx(want).epsilon(1e-12));
        }
    }

    // log branch: E(lambda X) = E(X) - (N(N-1)/2) log(lambda)
    std::vector<double> pts = {0.1, 0.45, 0.8};
    auto c3 = PointConfiguration::create(pts, dom);
    double e = riesz_energy(c3, RieszExponent(0.0, 1));
    auto sc = scale_configuration(c3, 2.0);
    CHECK(riesz_energy(sc, RieszExponent(0.0, 1)) ==
          doctest::Approx(e - 3.0 * std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("periodic configurations reduce to the fundamental cell") {
    auto lat = std::make_shared<Lattice>(Lattice::from_name("integers", 1.0));
    auto dom = Domain::periodic_cell(lat, 4.0);
    auto cfg = PointConfiguration::create({-1.0, 5.5}, dom);
    CHECK(cfg.coords[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(cfg.coords[1] == doctest::Approx(1.5).epsilon(1e-14));
    // coincidence modulo the lattice is rejected
    CHECK_THROWS_AS(PointConfiguration::create({0.5, 4.5}, dom), std::domain_error);
}
