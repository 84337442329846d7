#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

#include "bifilm/diagnostics.hpp"
#include "bifilm/dynamics.hpp"

namespace bifilm {

enum class Scheme {
    // Stabilized first-order split: the diagonal fourth-order part with frozen
    // per-channel coefficient c = max(a_eps) is solved implicitly (closed-form
    // 2x2 per mode), the remainder explicitly. Unconditionally stable for the
    // stiff part because the frozen coefficient dominates the true mobility.
    semi_implicit_spectral,
    // Backward Euler with a damped Newton solve on the non-conserved modes.
    fully_implicit_euler,
    // Heun/Euler embedded pair, step size additionally capped by the stability
    // estimate dt <= safety / lambda_max.
    explicit_adaptive,
};

struct StepControls {
    Scheme scheme = Scheme::semi_implicit_spectral;
    double rel_tol = 1e-6;
    double abs_tol = 1e-9;
    double dt_init = 1e-6;
    double dt_min = 1e-13;
    double dt_max = 0.1;
    int max_newton_iters = 12;

    void validate() const;
};

// One attempted step of size dt. err_est is the scaled local error (accept at
// <= 1); +infinity signals a solver-level rejection (Newton breakdown or a
// non-finite intermediate), in which case `next` is the input state. Mode 0 of
// both channels is copied bit-for-bit by every scheme.
struct StepResult {
    State next;
    double err_est = 0.0;
};
StepResult step(const System& sys, const State& state, double dt, const StepControls& controls);

// Hard integration failure; carries the last accepted state for post-mortem.
class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& what, State last, double dt_at_failure)
        : std::runtime_error(what), last_state(std::move(last)), dt(dt_at_failure) {}
    State last_state;
    double dt;
};

using SampleSink = std::function<void(const DiagnosticsRecord&, const State&)>;

// Advance `state` through every sample time (strictly increasing, first >= state.t,
// each hit exactly), emitting a diagnostics record per sample. Adaptive dt with
// halving on rejection; dt shrinking below dt_min throws StepFailure. On return
// `state` is the state at the final sample time.
void integrate(const System& sys, State& state, std::span<const double> sample_times,
               const StepControls& controls, const SampleSink& sink);

}  // namespace bifilm
