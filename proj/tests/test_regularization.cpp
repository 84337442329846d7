#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "bifilm/regularize.hpp"

using namespace bifilm;

TEST_CASE("strength validation") {
    CHECK_NOTHROW(RegEps(1e-12));
    CHECK_NOTHROW(RegEps(1.0));
    CHECK_THROWS_AS(RegEps(0.0), std::invalid_argument);
    CHECK_THROWS_AS(RegEps(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(RegEps(1.5), std::invalid_argument);
    CHECK_THROWS_AS(RegEps(std::nan("")), std::invalid_argument);
}

TEST_CASE("mobility cutoff") {
    const RegEps e(0.1);
    CHECK(mobility(2.0, e) == doctest::Approx(2.1));
    CHECK(mobility(0.0, e) == doctest::Approx(0.1));
    CHECK(mobility(-3.0, e) == doctest::Approx(0.1));
    // Lipschitz constant 1
    CHECK(std::abs(mobility(0.4, e) - mobility(0.1, e)) <= 0.3 + 1e-15);
}

TEST_CASE("entropy density") {
    CHECK(entropy_density(1.0) == doctest::Approx(0.0));
    CHECK(entropy_density(0.0) == doctest::Approx(1.0));  // limit value
    const double e = std::exp(1.0);
    CHECK(entropy_density(e) == doctest::Approx(1.0));
    CHECK(entropy_density(0.5) >= 0.0);
    CHECK_THROWS_AS(entropy_density(-0.1), std::domain_error);
}

TEST_CASE("regularized entropy branch values") {
    // negative branch at s = -1/2, eps = 1/2:
    // s^2/(2 eps) + s log eps + eps log eps - eps + 1
    //   = 1/4 - (1/2) log(1/2) + (1/2) log(1/2) + 1/2 = 3/4
    const RegEps h(0.5);
    CHECK(entropy_density_reg(-0.5, h) == doctest::Approx(0.75));

    // non-negative branch is phi shifted by eps: (s+eps)log(s+eps) - (s+eps) + 1
    const RegEps one(1.0);
    CHECK(entropy_density_reg(0.0, one) == doctest::Approx(0.0));
    CHECK(entropy_density_reg(1.0, one) == doctest::Approx(2.0 * std::log(2.0) - 1.0));
    for (double s : {0.0, 0.3, 1.0, 4.0})
        CHECK(entropy_density_reg(s, h) == doctest::Approx(entropy_density(s + 0.5)));

    CHECK_THROWS_AS(entropy_density_reg(0.5, h, 3), std::invalid_argument);
}

TEST_CASE("C1 match at zero and derivative consistency") {
    for (double ev : {1.0, 0.25, 1e-3}) {
        CAPTURE(ev);
        const RegEps e(ev);
        // value and slope continuous across s = 0
        CHECK(entropy_density_reg(-1e-12, e) ==
              doctest::Approx(entropy_density_reg(1e-12, e)).epsilon(1e-10));
        CHECK(entropy_density_reg(-1e-12, e, 1) ==
              doctest::Approx(entropy_density_reg(1e-12, e, 1)).epsilon(1e-9));
        CHECK(entropy_density_reg(0.0, e, 1) == doctest::Approx(std::log(ev)));

        // phi_eps'' = 1/a_eps on both branches
        for (double s : {-2.0, -0.3, 0.0, 0.7, 5.0})
            CHECK(entropy_density_reg(s, e, 2) == doctest::Approx(1.0 / mobility(s, e)));

        // finite differences reproduce the stated derivatives
        for (double s : {-1.0, -0.2, 0.4, 2.0}) {
            const double h = 1e-6 * (1.0 + std::abs(s));
            const double fd1 =
                (entropy_density_reg(s + h, e) - entropy_density_reg(s - h, e)) / (2.0 * h);
            CHECK(fd1 == doctest::Approx(entropy_density_reg(s, e, 1)).epsilon(1e-5));
            const double fd2 = (entropy_density_reg(s + h, e) - 2.0 * entropy_density_reg(s, e) +
                                entropy_density_reg(s - h, e)) /
                               (h * h);
            CHECK(fd2 == doctest::Approx(entropy_density_reg(s, e, 2)).epsilon(1e-3));
        }
    }
}

TEST_CASE("non-negativity and convexity over the admissible strengths") {
    for (double ev : {1e-4, 1e-2, 0.1, 0.5, 1.0}) {
        const RegEps e(ev);
        double prev = entropy_density_reg(-5.0, e, 1);
        for (double s = -5.0; s <= 5.0; s += 0.01) {
            CHECK(entropy_density_reg(s, e) >= 0.0);
            const double d1 = entropy_density_reg(s, e, 1);
            CHECK(d1 >= prev - 1e-12);  // increasing first derivative = convex
            prev = d1;
        }
        // the unique minimum sits where a layer height of 1 - eps is attained
        CHECK(entropy_density_reg(1.0 - ev, e) == doctest::Approx(0.0));
    }
}

TEST_CASE("negative values are penalized at rate s^2 / (2 eps)") {
    const double s = -0.3;
    double prev = entropy_density_reg(s, RegEps(0.1));
    for (double ev : {0.01, 1e-3, 1e-4}) {
        const double cur = entropy_density_reg(s, RegEps(ev));
        CHECK(cur > prev);  // stiffer penalty as eps shrinks
        CHECK(cur >= s * s / (2.0 * ev) - std::abs(s * std::log(ev)) - 1.0);
        prev = cur;
    }
}

TEST_CASE("convergence to the entropy on the positive half-line") {
    for (double s : {0.5, 2.0}) {
        double prev = std::abs(entropy_density_reg(s, RegEps(0.5)) - entropy_density(s));
        for (double ev : {0.1, 0.01, 1e-3}) {
            const double gap = std::abs(entropy_density_reg(s, RegEps(ev)) - entropy_density(s));
            CHECK(gap < prev);
            prev = gap;
        }
        CHECK(prev <= 5e-3);
    }
}
