#include <doctest.h>

#include <cmath>
#include <limits>

#include "rangestat/gaussian_kernels.hpp"
#include "quadrature_util.hpp"

using namespace rangestat;

TEST_SUITE("gaussian_kernels") {

TEST_CASE("closed-form anchor values") {
    CHECK(g(0.0, TimeScale{1.0}) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
    CHECK(g(1.0, TimeScale{1.0}) == doctest::Approx(0.24197072451914337).epsilon(1e-15));
    CHECK(g_prime(0.0, TimeScale{1.0}) == 0.0);
    CHECK(g_second(0.0, TimeScale{1.0}) ==
          doctest::Approx(-0.3989422804014327).epsilon(1e-15));
    // scaling: g_t(x) = g_1(x/sqrt(t)) / sqrt(t)
    const double t = 2.7;
    CHECK(g(0.9, TimeScale{t}) ==
          doctest::Approx(g(0.9 / std::sqrt(t), TimeScale{1.0}) / std::sqrt(t)).epsilon(1e-14));
}

TEST_CASE("parity: g and g_second even, g_prime odd (exact)") {
    const TimeScale t{0.8};
    for (double x : {0.1, 0.37, 1.0, 2.5, 7.0}) {
        CHECK(g(x, t) == g(-x, t));
        CHECK(g_second(x, t) == g_second(-x, t));
        CHECK(g_prime(x, t) == -g_prime(-x, t));
    }
}

TEST_CASE("g_second vanishes at x = sqrt(t)") {
    CHECK(g_second(1.0, TimeScale{1.0}) == 0.0);
    CHECK(g_second(2.0, TimeScale{4.0}) == 0.0);
    // sqrt(2)^2 != 2 exactly in floating point; the zero is hit to roundoff
    CHECK(std::abs(g_second(std::sqrt(2.0), TimeScale{2.0})) < 1e-15);
}

TEST_CASE("finite-difference consistency") {
    const double h = 1e-5;
    {
        const TimeScale t{2.0};
        const double x = 0.7;
        const double fd = (g(x + h, t) - g(x - h, t)) / (2.0 * h);
        CHECK(std::abs(fd - g_prime(x, t)) < 1e-8);
    }
    {
        const TimeScale t{0.5};
        const double x = 1.3;
        const double fd = (g(x + h, t) - 2.0 * g(x, t) + g(x - h, t)) / (h * h);
        CHECK(std::abs(fd - g_second(x, t)) < 1e-6);
    }
    // derivative relation holds across the board
    testutil::TestRng rng(11);
    for (int i = 0; i < 50; ++i) {
        const TimeScale t{rng.uniform(0.2, 3.0)};
        const double x = rng.uniform(-4.0, 4.0);
        CHECK(std::abs((g(x + h, t) - g(x - h, t)) / (2.0 * h) - g_prime(x, t)) < 1e-6);
        CHECK(std::abs((g(x + h, t) - 2.0 * g(x, t) + g(x - h, t)) / (h * h) -
                       g_second(x, t)) < 1e-5);
    }
}

TEST_CASE("unit mass by adaptive quadrature") {
    for (double t : {0.3, 1.0, 5.0}) {
        const TimeScale ts{t};
        const double lim = 10.0 * std::sqrt(t);
        const double mass =
            testutil::adaptive_simpson([&](double x) { return g(x, ts); }, -lim, lim, 1e-12);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("strict positivity inside the representable region") {
    // Between ~38.6 and the cutoff at 40 the IEEE exponential itself
    // underflows to zero, so strict positivity is only promised below that.
    const TimeScale t{1.0};
    for (double x = 0.0; x <= 37.0; x += 0.7) CHECK(g(x, t) > 0.0);
}

TEST_CASE("underflow cutoff returns exact zero") {
    const TimeScale t{1.0};
    for (double x : {40.001, 41.0, 100.0, 1e6, 1e300}) {
        CHECK(g(x, t) == 0.0);
        CHECK(g_prime(x, t) == 0.0);
        CHECK(g_second(x, t) == 0.0);
        CHECK(g(-x, t) == 0.0);
    }
    // scales with sqrt(t): 50 is inside the cutoff for t = 4
    CHECK(g(50.0, TimeScale{4.0}) > 0.0);
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(TimeScale{0.0}, std::domain_error);
    CHECK_THROWS_AS(TimeScale{-1.0}, std::domain_error);
    CHECK_THROWS_AS(TimeScale{std::nan("")}, std::domain_error);
    CHECK_THROWS_AS(TimeScale{std::numeric_limits<double>::infinity()}, std::domain_error);
    const TimeScale ok{1.0};
    CHECK_THROWS_AS(g(std::nan(""), ok), std::domain_error);
    CHECK_THROWS_AS(g_prime(std::numeric_limits<double>::infinity(), ok), std::domain_error);
    CHECK_THROWS_AS(g_second(std::nan(""), ok), std::domain_error);
}

}  // TEST_SUITE
