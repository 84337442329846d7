#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "bifilm/diagnostics.hpp"
#include "bifilm/dynamics.hpp"
#include "bifilm/errors.hpp"
#include "oracles.hpp"

using namespace bifilm;

namespace {

State flat_state(int n, double L, double fbar, double gbar) {
    State s;
    s.f.length = s.g.length = L;
    s.f.coeffs.assign(n + 1, 0.0);
    s.g.coeffs.assign(n + 1, 0.0);
    s.f.coeffs[0] = fbar * std::sqrt(L);
    s.g.coeffs[0] = gbar * std::sqrt(L);
    return s;
}

State random_state(int n, double L, std::mt19937_64& rng, double amp) {
    std::uniform_real_distribution<double> lvl(0.5, 1.5);
    std::uniform_real_distribution<double> u(-amp, amp);
    State s = flat_state(n, L, lvl(rng), lvl(rng));
    for (int k = 1; k <= n; ++k) {
        s.f.coeffs[k] = u(rng);
        s.g.coeffs[k] = u(rng);
    }
    return s;
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(PhysParams(1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PhysParams(1.0, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PhysParams(2.0, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PhysParams(2.0, 1.0, 0.0), std::invalid_argument);

    // A = (mu+/mu-)(gamma_d + gamma_w)/gamma_d, B = mu+/mu-
    const PhysParams p = PhysParams::from_physical(2.0, 1.0, 1.0, 1.0, 3.0);
    CHECK(p.B == doctest::Approx(0.5));
    CHECK(p.A == doctest::Approx(1.0));
    CHECK(p.L == 3.0);
    CHECK_THROWS_AS(PhysParams::from_physical(0.0, 1.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("flat states are exact equilibria") {
    const int n = 8;
    Basis basis(n, make_grid(4 * (n + 1), 1.0));
    System sys(PhysParams(2.0, 1.0, 1.0), RegEps(0.1), basis);
    const State s = flat_state(n, 1.0, 1.0, 2.0);
    const auto [df, dg] = sys.rhs(s);
    for (int j = 0; j <= n; ++j) {
        CHECK(df.coeffs[j] == 0.0);
        CHECK(dg.coeffs[j] == 0.0);
    }
}

TEST_CASE("single-mode perturbation matches the closed form") {
    // f = fbar + delta phi_j, g = gbar + eta phi_j (positive everywhere):
    // the mode-j response is exactly -(j pi / L)^4 (fbar+eps)(A delta + B eta)
    // because the self-interaction integral phi_j dxxx phi_j dx phi_j vanishes.
    const int n = 8;
    const double L = 2.0;
    const double A = 2.0, B = 1.0, ev = 0.1;
    Basis basis(n, make_grid(8 * (n + 1), L));
    System sys(PhysParams(A, B, L), RegEps(ev), basis);

    for (int j : {1, 3, 8}) {
        const double delta = 0.05, eta = 0.03, fbar = 1.0, gbar = 1.5;
        State s = flat_state(n, L, fbar, gbar);
        s.f.coeffs[j] = delta;
        s.g.coeffs[j] = eta;
        const auto [df, dg] = sys.rhs(s);
        const double k4 = std::pow(basis.kappa(j), 4);
        const double want_f = -k4 * (fbar + ev) * (A * delta + B * eta);
        const double want_g = -k4 * (gbar + ev) * (delta + eta);
        CHECK(df.coeffs[j] == doctest::Approx(want_f).epsilon(1e-10));
        CHECK(dg.coeffs[j] == doctest::Approx(want_g).epsilon(1e-10));
        CHECK(df.coeffs[0] == 0.0);
        CHECK(dg.coeffs[0] == 0.0);
    }
}

TEST_CASE("vector field equals the brute-force quadrature sum") {
    const int n = 4;
    const int M = 512;  // the acceptance gate repeats this at M = 4096
    const double L = 1.0, A = 2.0, B = 1.0, ev = 0.1;
    Basis basis(n, make_grid(M, L));
    System sys(PhysParams(A, B, L), RegEps(ev), basis);

    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        // amp 0.4 makes some states dip negative, exercising the cutoff
        const State s = random_state(n, L, rng, 0.4);
        const auto [df, dg] = sys.rhs(s);
        const auto ref = oracle::rhs(s, A, B, ev, M);
        double scale = 1e-30;
        for (int j = 0; j <= n; ++j)
            scale = std::max({scale, std::abs(ref.df[j]), std::abs(ref.dg[j])});
        for (int j = 0; j <= n; ++j) {
            CHECK(std::abs(df.coeffs[j] - ref.df[j]) <= 1e-10 * scale);
            CHECK(std::abs(dg.coeffs[j] - ref.dg[j]) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("single-layer reduction freezes f") {
    const int n = 6;
    const double L = 1.0, ev = 0.05;
    Basis basis(n, make_grid(4 * (n + 1), L));
    System sys(PhysParams(2.0, 1.0, L), RegEps(ev), basis, FluxMode::lower_layer_only);
    std::mt19937_64 rng(3);
    const State s = random_state(n, L, rng, 0.2);
    const auto [df, dg] = sys.rhs(s);
    const auto ref = oracle::rhs(s, 2.0, 1.0, ev, basis.grid().panels(), true);
    double scale = 1e-30;
    for (int j = 0; j <= n; ++j) scale = std::max(scale, std::abs(ref.dg[j]));
    for (int j = 0; j <= n; ++j) {
        CHECK(df.coeffs[j] == 0.0);
        CHECK(std::abs(dg.coeffs[j] - ref.dg[j]) <= 1e-10 * scale);
    }
}

TEST_CASE("jacobian at a flat state is block diagonal") {
    const int n = 6;
    const double L = 1.0, A = 2.0, B = 1.0, ev = 0.1;
    const double fbar = 1.0, gbar = 0.5;
    Basis basis(n, make_grid(4 * (n + 1), L));
    System sys(PhysParams(A, B, L), RegEps(ev), basis);
    const auto J = sys.jacobian(flat_state(n, L, fbar, gbar));
    const int dim = 2 * (n + 1);
    REQUIRE(static_cast<int>(J.size()) == dim * dim);

    const double kn4 = std::pow(basis.kappa(n), 4);
    const double tol = 1e-6 * kn4 * A * 3.0;  // forward-difference noise floor
    for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= n; ++k) {
            const double k4 = std::pow(basis.kappa(k), 4);
            const double d = (j == k && j > 0) ? 1.0 : 0.0;
            const double ff = J[(0 * (n + 1) + j) * dim + (0 * (n + 1) + k)];
            const double fg = J[(0 * (n + 1) + j) * dim + (1 * (n + 1) + k)];
            const double gf = J[(1 * (n + 1) + j) * dim + (0 * (n + 1) + k)];
            const double gg = J[(1 * (n + 1) + j) * dim + (1 * (n + 1) + k)];
            CHECK(std::abs(ff - d * (-A * (fbar + ev) * k4)) <= tol);
            CHECK(std::abs(fg - d * (-B * (fbar + ev) * k4)) <= tol);
            CHECK(std::abs(gf - d * (-(gbar + ev) * k4)) <= tol);
            CHECK(std::abs(gg - d * (-(gbar + ev) * k4)) <= tol);
        }
}

TEST_CASE("jacobian-vector products agree with central differences") {
    const int n = 6;
    const double L = 1.0;
    Basis basis(n, make_grid(4 * (n + 1), L));
    System sys(PhysParams(2.0, 1.0, L), RegEps(0.1), basis);
    std::mt19937_64 rng(11);
    const State s = random_state(n, L, rng, 0.1);
    const auto J = sys.jacobian(s);
    const int stride = n + 1, dim = 2 * stride;

    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(dim, 0.0);
    for (int k = 1; k <= n; ++k) {
        v[k] = u(rng);
        v[stride + k] = u(rng);
    }

    const double h = 1e-5;
    State sp = s, sm = s;
    for (int k = 0; k <= n; ++k) {
        sp.f.coeffs[k] += h * v[k];
        sp.g.coeffs[k] += h * v[stride + k];
        sm.f.coeffs[k] -= h * v[k];
        sm.g.coeffs[k] -= h * v[stride + k];
    }
    const auto [dfp, dgp] = sys.rhs(sp);
    const auto [dfm, dgm] = sys.rhs(sm);

    double scale = 1e-30;
    std::vector<double> fd(dim);
    for (int k = 0; k <= n; ++k) {
        fd[k] = (dfp.coeffs[k] - dfm.coeffs[k]) / (2.0 * h);
        fd[stride + k] = (dgp.coeffs[k] - dgm.coeffs[k]) / (2.0 * h);
        scale = std::max({scale, std::abs(fd[k]), std::abs(fd[stride + k])});
    }
    for (int r = 0; r < dim; ++r) {
        double jv = 0.0;
        for (int c = 0; c < dim; ++c) jv += J[r * dim + c] * v[c];
        CHECK(std::abs(jv - fd[r]) <= 1e-5 * scale);
    }
}

TEST_CASE("energy gradient pairing with the vector field gives minus the dissipation") {
    // sum_j dE1/dF_j df_j + dE1/dG_j dg_j = -D1 on the same grid: the discrete
    // form of the gradient-flow identity, exact up to rounding.
    const int n = 10;
    const double L = 1.0, A = 2.0, B = 1.0, ev = 0.1;
    Basis basis(n, make_grid(8 * (n + 1), L));
    const PhysParams phys(A, B, L);
    System sys(phys, RegEps(ev), basis);
    std::mt19937_64 rng(5);

    for (int trial = 0; trial < 10; ++trial) {
        const State s = random_state(n, L, rng, 0.08);
        const auto [df, dg] = sys.rhs(s);
        double lhs = 0.0;
        const double r = B / (A - B);
        for (int j = 1; j <= n; ++j) {
            const double k2 = basis.kappa(j) * basis.kappa(j);
            const double gf = k2 * (s.f.coeffs[j] + r * (s.f.coeffs[j] + s.g.coeffs[j]));
            const double gg = k2 * r * (s.f.coeffs[j] + s.g.coeffs[j]);
            lhs += gf * df.coeffs[j] + gg * dg.coeffs[j];
        }
        const double rhs = -dissipation1(s, phys, RegEps(ev), basis);
        CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max({std::abs(lhs), std::abs(rhs), 1e-12}));
    }
}

TEST_CASE("vector field is homogeneous of degree one in (A, B), bitwise") {
    const int n = 8;
    const double L = 1.0;
    Basis basis(n, make_grid(4 * (n + 1), L));
    System sys1(PhysParams(2.0, 1.0, L), RegEps(0.1), basis);
    System sys2(PhysParams(4.0, 2.0, L), RegEps(0.1), basis);
    std::mt19937_64 rng(17);
    const State s = random_state(n, L, rng, 0.3);
    const auto [df1, dg1] = sys1.rhs(s);
    const auto [df2, dg2] = sys2.rhs(s);
    for (int j = 0; j <= n; ++j) {
        // doubling (A, B) scales every intermediate by a power of two, which
        // commutes with rounding: equality is exact, not approximate
        CHECK(df2.coeffs[j] == 2.0 * df1.coeffs[j]);
        CHECK(dg2.coeffs[j] == dg1.coeffs[j]);
    }
}

TEST_CASE("overflow surfaces as a typed error") {
    const int n = 4;
    Basis basis(n, make_grid(32, 1.0));
    System sys(PhysParams(2.0, 1.0, 1.0), RegEps(0.1), basis);
    State s = flat_state(n, 1.0, 1.0, 1.0);
    s.f.coeffs[1] = 1e200;
    CHECK_THROWS_AS(sys.rhs(s), NonFiniteError);
}

TEST_CASE("state validation and stability rate") {
    const int n = 4;
    const double L = 1.0;
    Basis basis(n, make_grid(32, L));
    CHECK_THROWS_AS(validate_state(flat_state(n + 1, L, 1.0, 1.0), basis),
                    std::invalid_argument);
    CHECK_NOTHROW(validate_state(flat_state(n, L, 1.0, 1.0), basis));

    System sys(PhysParams(2.0, 1.0, L), RegEps(0.1), basis);
    const double kn4 = std::pow(basis.kappa(n), 4);
    CHECK(sys.stability_rate(flat_state(n, L, 1.0, 2.0)) ==
          doctest::Approx(2.1 * 2.0 * kn4).epsilon(1e-12));
}
