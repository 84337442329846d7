#include "bifilm/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "bifilm/errors.hpp"

namespace bifilm {

namespace {

constexpr double kExplicitSafety = 0.9;
constexpr long kMaxTotalSteps = 50'000'000;  // runaway guard, far beyond sane runs

double scale_of(double ref, const StepControls& c) {
    return c.abs_tol + c.rel_tol * std::abs(ref);
}

// max over modes >= 1 of |a-b| / (abs_tol + rel_tol max(|a|,|b|))
double scaled_diff(const State& a, const State& b, const StepControls& c) {
    double e = 0.0;
    const int n = a.f.modes();
    for (int j = 1; j <= n; ++j) {
        const double sf =
            c.abs_tol + c.rel_tol * std::max(std::abs(a.f.coeffs[j]), std::abs(b.f.coeffs[j]));
        const double sg =
            c.abs_tol + c.rel_tol * std::max(std::abs(a.g.coeffs[j]), std::abs(b.g.coeffs[j]));
        e = std::max(e, std::abs(a.f.coeffs[j] - b.f.coeffs[j]) / sf);
        e = std::max(e, std::abs(a.g.coeffs[j] - b.g.coeffs[j]) / sg);
    }
    return e;
}

// One semi-implicit substep from a precomputed rhs. Solves, per mode j >= 1,
//   (I + h L_j) u' = u + h (rhs + L_j u)
// with the frozen stiff block L_j = kappa_j^4 [[cf A, cf B], [cg, cg]].
State apply_semi_implicit(const System& sys, const State& state, double h,
                          const std::vector<double>& df, const std::vector<double>& dg,
                          const RhsInfo& info) {
    const PhysParams& p = sys.phys();
    const int n = sys.basis().modes();
    State next = state;
    next.t = state.t + h;
    const double cf = info.max_mobility_f;
    const double cg = info.max_mobility_g;
    for (int j = 1; j <= n; ++j) {
        const double kap = sys.basis().kappa(j);
        const double k4 = kap * kap * kap * kap;
        const double fj = state.f.coeffs[j];
        const double gj = state.g.coeffs[j];
        if (sys.mode() == FluxMode::lower_layer_only) {
            // f frozen; g sees its own flux only, stiff part -cg k4 G
            const double rg = dg[j] + cg * k4 * gj;
            next.f.coeffs[j] = fj;
            next.g.coeffs[j] = (gj + h * rg) / (1.0 + h * cg * k4);
            continue;
        }
        const double rf = df[j] + cf * k4 * (p.A * fj + p.B * gj);
        const double rg = dg[j] + cg * k4 * (fj + gj);
        const double bf = fj + h * rf;
        const double bg = gj + h * rg;
        const double a11 = 1.0 + h * cf * k4 * p.A;
        const double a12 = h * cf * k4 * p.B;
        const double a21 = h * cg * k4;
        const double a22 = 1.0 + h * cg * k4;
        // det = 1 + h k4 (cf A + cg) + h^2 cf cg k4^2 (A - B) > 0 since A > B
        const double det = a11 * a22 - a12 * a21;
        next.f.coeffs[j] = (a22 * bf - a12 * bg) / det;
        next.g.coeffs[j] = (a11 * bg - a21 * bf) / det;
    }
    return next;
}

struct Packed {
    // modes >= 1 of both channels: [F_1..F_n, G_1..G_n]
    static Eigen::VectorXd pack(const State& s) {
        const int n = s.f.modes();
        Eigen::VectorXd u(2 * n);
        for (int j = 1; j <= n; ++j) {
            u[j - 1] = s.f.coeffs[j];
            u[n + j - 1] = s.g.coeffs[j];
        }
        return u;
    }
    static void unpack(const Eigen::VectorXd& u, State& s) {
        const int n = s.f.modes();
        for (int j = 1; j <= n; ++j) {
            s.f.coeffs[j] = u[j - 1];
            s.g.coeffs[j] = u[n + j - 1];
        }
    }
};

// Backward Euler substep by Newton iteration on the non-conserved modes.
// Empty optional = no convergence within max_newton_iters.
std::optional<State> substep_implicit(const System& sys, const State& state, double h,
                                      const StepControls& c, Workspace& ws,
                                      std::vector<double>& df, std::vector<double>& dg) {
    const int n = sys.basis().modes();
    const int dim = 2 * n;
    const Eigen::VectorXd u0 = Packed::pack(state);
    State cur = state;
    cur.t = state.t + h;
    Eigen::VectorXd u = u0;

    for (int iter = 0; iter < c.max_newton_iters; ++iter) {
        Packed::unpack(u, cur);
        sys.rhs(cur, df, dg, ws);
        Eigen::VectorXd r(dim);
        for (int j = 1; j <= n; ++j) {
            r[j - 1] = u[j - 1] - u0[j - 1] - h * df[j];
            r[n + j - 1] = u[n + j - 1] - u0[n + j - 1] - h * dg[j];
        }
        if (r.lpNorm<Eigen::Infinity>() == 0.0) return cur;  // exact root (e.g. equilibrium)

        const std::vector<double> jac = sys.jacobian(cur);
        const int full = 2 * (n + 1);
        Eigen::MatrixXd Jr(dim, dim);
        for (int rrow = 0; rrow < dim; ++rrow) {
            const int jr = rrow < n ? rrow + 1 : (n + 1) + (rrow - n) + 1;
            for (int col = 0; col < dim; ++col) {
                const int jc = col < n ? col + 1 : (n + 1) + (col - n) + 1;
                Jr(rrow, col) = (rrow == col ? 1.0 : 0.0) -
                                h * jac[static_cast<std::size_t>(jr) * full + jc];
            }
        }
        const Eigen::VectorXd delta = Jr.partialPivLu().solve(-r);
        if (!delta.allFinite()) return std::nullopt;
        u += delta;

        double dn = 0.0;
        for (int i = 0; i < dim; ++i)
            dn = std::max(dn, std::abs(delta[i]) / scale_of(u[i], c));
        if (dn <= 0.05) {
            Packed::unpack(u, cur);
            return cur;
        }
    }
    return std::nullopt;
}

State axpy_state(const State& base, double h, const std::vector<double>& df,
                 const std::vector<double>& dg) {
    State next = base;
    next.t = base.t + h;
    const int n = base.f.modes();
    for (int j = 1; j <= n; ++j) {
        next.f.coeffs[j] = base.f.coeffs[j] + h * df[j];
        next.g.coeffs[j] = base.g.coeffs[j] + h * dg[j];
    }
    return next;
}

}  // namespace

void StepControls::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ConfigError("tolerances must be positive");
    if (!(dt_min > 0.0) || !(dt_init >= dt_min) || !(dt_max >= dt_init))
        throw ConfigError("need 0 < dt_min <= dt_init <= dt_max");
    if (max_newton_iters < 1) throw ConfigError("max_newton_iters must be at least 1");
}

StepResult step(const System& sys, const State& state, double dt, const StepControls& controls) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step size must be positive");
    validate_state(state, sys.basis());
    const int n = sys.basis().modes();
    Workspace ws;
    std::vector<double> df(n + 1), dg(n + 1);

    const double inf = std::numeric_limits<double>::infinity();
    switch (controls.scheme) {
        case Scheme::semi_implicit_spectral: {
            const RhsInfo info = sys.rhs(state, df, dg, ws);
            const State full = apply_semi_implicit(sys, state, dt, df, dg, info);
            const State h1 = apply_semi_implicit(sys, state, 0.5 * dt, df, dg, info);
            std::vector<double> df2(n + 1), dg2(n + 1);
            const RhsInfo info2 = sys.rhs(h1, df2, dg2, ws);
            const State h2 = apply_semi_implicit(sys, h1, 0.5 * dt, df2, dg2, info2);
            const double err = scaled_diff(full, h2, controls);
            return {h2, err};
        }
        case Scheme::fully_implicit_euler: {
            const auto full = substep_implicit(sys, state, dt, controls, ws, df, dg);
            if (!full) return {state, inf};
            const auto h1 = substep_implicit(sys, state, 0.5 * dt, controls, ws, df, dg);
            if (!h1) return {state, inf};
            const auto h2 = substep_implicit(sys, *h1, 0.5 * dt, controls, ws, df, dg);
            if (!h2) return {state, inf};
            return {*h2, scaled_diff(*full, *h2, controls)};
        }
        case Scheme::explicit_adaptive: {
            sys.rhs(state, df, dg, ws);
            const State euler = axpy_state(state, dt, df, dg);
            std::vector<double> df2(n + 1), dg2(n + 1);
            sys.rhs(euler, df2, dg2, ws);
            for (int j = 0; j <= n; ++j) {
                df[j] = 0.5 * (df[j] + df2[j]);
                dg[j] = 0.5 * (dg[j] + dg2[j]);
            }
            const State heun = axpy_state(state, dt, df, dg);
            return {heun, scaled_diff(euler, heun, controls)};
        }
    }
    throw std::logic_error("unknown scheme");
}

void integrate(const System& sys, State& state, std::span<const double> sample_times,
               const StepControls& controls, const SampleSink& sink) {
    controls.validate();
    validate_state(state, sys.basis());
    if (sample_times.empty()) throw std::invalid_argument("need at least one sample time");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        const double s = sample_times[i];
        if (!std::isfinite(s)) throw std::invalid_argument("sample times must be finite");
        if (i == 0 && s < state.t - 1e-12 * (1.0 + std::abs(state.t)))
            throw std::invalid_argument("first sample time precedes initial time");
        if (i > 0 && !(s > sample_times[i - 1]))
            throw std::invalid_argument("sample times must be strictly increasing");
    }

    const auto t_eps = [](double t) { return 1e-12 * (1.0 + std::abs(t)); };
    const bool explicit_scheme = controls.scheme == Scheme::explicit_adaptive;
    double dt = std::clamp(controls.dt_init, controls.dt_min, controls.dt_max);
    double last_dt = controls.dt_init;
    long total_steps = 0;

    const auto emit = [&](const State& s) {
        sink(measure(s, sys.phys(), sys.eps(), sys.basis(), last_dt), s);
    };

    for (const double target : sample_times) {
        while (state.t < target - t_eps(target)) {
            double h = std::min(dt, target - state.t);
            if (explicit_scheme) h = std::min(h, kExplicitSafety / sys.stability_rate(state));
            double err;
            State next = state;
            try {
                StepResult r = step(sys, state, h, controls);
                next = std::move(r.next);
                err = r.err_est;
            } catch (const NonFiniteError&) {
                err = std::numeric_limits<double>::infinity();
            }
            if (++total_steps > kMaxTotalSteps)
                throw StepFailure("step budget exhausted", state, h);
            if (err <= 1.0) {
                state = std::move(next);
                if (std::abs(state.t - target) <= t_eps(target)) state.t = target;
                last_dt = h;
                const double grow =
                    err > 0.0 ? std::clamp(0.9 / std::sqrt(err), 0.25, 4.0) : 4.0;
                dt = std::clamp(h * grow, controls.dt_min, controls.dt_max);
            } else {
                dt = 0.5 * h;
                if (dt < controls.dt_min)
                    throw StepFailure("step size underflow at t = " + std::to_string(state.t),
                                      state, dt);
            }
        }
        state.t = target;  // exact landing for the emitted sample
        emit(state);
    }
}

}  // namespace bifilm
