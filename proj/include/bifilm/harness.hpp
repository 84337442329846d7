#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bifilm/io.hpp"
#include "bifilm/run_config.hpp"

namespace bifilm {

// Initial state plus how far below zero the synthesized grid values dip
// (non-positive; nonzero only for projected kinds, and recorded, never hidden).
struct InitialData {
    State state;
    double undershoot_f = 0.0;
    double undershoot_g = 0.0;
};
InitialData build_initial(const RunConfig& cfg, const Basis& basis);

struct RunChecks {
    bool mass = false;     // relative drift of both masses <= 1e-13 at every sample
    bool entropy = false;  // E2eps(t) + int_0^t D2 <= E2eps(0) + 1e-3 max(E2eps(0), 1)
                           // + twice the measured trapezoid refinement difference
                           // (the check's own time-quadrature error, not the scheme's)
    bool energy = false;   // E1 non-increasing between positive samples, slack
                           // 10 rel_tol max(E1(0), 1) dt
    double mass_drift_f = 0.0, mass_drift_g = 0.0;  // max relative drift seen
    double entropy_excess = 0.0;  // worst LHS - E2eps(0) (before slack)
    double entropy_quad_allowance = 0.0;  // full-vs-half-resolution int D2 gap, doubled
    double energy_uptick = 0.0;   // worst E1 increase between checked samples
    bool all() const noexcept { return mass && entropy && energy; }
};

struct RunResult {
    RunConfig config;  // resolved (M filled in)
    std::vector<DiagnosticsRecord> records;
    std::vector<State> samples;
    bool failed = false;  // hard integration failure; records up to failure retained
    std::string failure_reason;
    RunChecks checks;
    double quad_err_energy2_eps = 0.0;  // |M vs 2M| on the initial state
    double quad_err_dissipation1 = 0.0;
    double undershoot_f = 0.0, undershoot_g = 0.0;
    std::filesystem::path out_dir;  // empty when no artifacts were requested
};

// Execute one configured run: build grid/basis/initial data, integrate over the
// uniform sample grid {k T/(count-1)}, apply the structural checks, and (when
// `out` is non-empty) write series.csv, state_t0.snapshot, state_final.snapshot
// and summary.txt into it. FluxMode selects the coupled system or the
// single-layer reduction.
RunResult run(const RunConfig& cfg, const std::filesystem::path& out,
              FluxMode mode = FluxMode::coupled);

struct SweepRow {
    double eps = 0.0;
    bool completed = false;
    double min_f_run = 0.0;   // most negative grid value of f seen over the run
    double min_g_run = 0.0;
    double neg_magnitude = 0.0;  // max(0, -min_f_run)
    double energy2_eps0 = 0.0;
    bool entropy_ok = false;
    bool node_bound_ok = false;  // phi_eps(min_f) w_min <= E2eps(0) + 1e-3 everywhere
};
struct SweepReport {
    std::vector<SweepRow> rows;
    bool complete = false;
    bool monotone = false;       // neg_magnitude non-increasing as eps decreases
    std::optional<double> slope; // d log(neg)/d log(eps); soft expectation >= 0.4
    bool ok() const noexcept;
};
SweepReport sweep_eps(const RunConfig& base, const std::filesystem::path& out);

struct RefineReport {
    std::vector<int> n_list;
    std::vector<double> endpoint_diffs;  // max-coeff norm, consecutive resolutions
    std::optional<double> order;         // log2 ratio of successive diffs
    bool decreasing = false;
    std::vector<double> residual_eps;
    std::vector<int> residual_samples;
    std::vector<double> residual_norms;  // weak-form residual, modes 1..3 combined
    bool residual_decreasing = false;
    bool ok() const noexcept { return decreasing && residual_decreasing; }
};
RefineReport refine_study(const RunConfig& base, const std::filesystem::path& out);

struct TfeRow {
    double eps = 0.0;
    double sup_f = 0.0;       // sup over samples and grid of |f| in the coupled run
    double sup_g_diff = 0.0;  // sup of |g_coupled - g_single|
};
struct TfeReport {
    std::vector<TfeRow> rows;
    bool scaling_ok = false;  // sup_f ratio tracks the eps ratio within factor 3
    bool ok() const noexcept { return scaling_ok; }
};
TfeReport tfe_check(const RunConfig& base, const std::filesystem::path& out);

// Closed-form eigenvalues of the one-mode linearization about flat layers:
// the 2x2 block -kappa^4 [[A (fbar+eps), B (fbar+eps)], [gbar+eps, gbar+eps]]
// has real, distinct, negative eigenvalues whenever A > B.
struct DecayOracle {
    double lambda_fast = 0.0;  // more negative
    double lambda_slow = 0.0;
};
DecayOracle decay_oracle(const PhysParams& phys, RegEps eps, int mode, double f_level,
                         double g_level);

struct DecayReport {
    bool stationary = false;  // amp == 0: exact equilibrium, exponents undefined
    DecayOracle oracle;
    double lambda_fast_measured = 0.0;
    double lambda_slow_measured = 0.0;
    double rel_err_fast = 0.0;
    double rel_err_slow = 0.0;
    bool positivity_ok = false;
    bool ok(double tol = 0.02) const noexcept;
};
DecayReport decay_check(const RunConfig& base, const std::filesystem::path& out);

std::vector<double> linspace_samples(double t_end, int count);

}  // namespace bifilm
