#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bifilm/errors.hpp"
#include "bifilm/harness.hpp"
#include "bifilm/io.hpp"
#include "bifilm/kernels.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;    // bad input, integration breakdown, I/O failure
constexpr int kExitChecks = 2;   // run completed but a structural check failed

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::string simd;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "configuration file, key = value lines")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir,
                    "output directory (default: $BIFILM_OUT, then the config's out_dir)");
    cmd->add_option("--override", args.overrides, "key=value override, repeatable");
    cmd->add_option("--simd", args.simd, "kernel lane: auto, scalar or avx2");
}

void apply_simd(const std::string& simd) {
    using bifilm::kernels::Lane;
    if (simd == "auto")
        bifilm::kernels::reset_lane();
    else if (simd == "scalar")
        bifilm::kernels::force_lane(Lane::scalar);
    else if (simd == "avx2")
        bifilm::kernels::force_lane(Lane::avx2);
    else
        throw bifilm::ConfigError("unknown simd lane: " + simd);
}

bifilm::RunConfig make_config(const CommonArgs& args) {
    bifilm::RunConfig cfg;
    if (!args.config_path.empty()) cfg = bifilm::load_config(args.config_path);
    for (const auto& o : args.overrides) bifilm::apply_override(cfg, o);
    if (!args.simd.empty()) cfg.simd = args.simd;
    apply_simd(cfg.simd);
    return cfg;
}

std::filesystem::path out_path(const CommonArgs& args, const bifilm::RunConfig& cfg) {
    if (!args.out_dir.empty()) return args.out_dir;
    if (const char* env = std::getenv("BIFILM_OUT")) return env;
    return cfg.out_dir;
}

const char* pf(bool ok) { return ok ? "pass" : "FAIL"; }

int do_run(const CommonArgs& args) {
    const auto cfg = make_config(args);
    const auto out = out_path(args, cfg);
    const auto res = bifilm::run(cfg, out);
    std::cout << "kernel lane " << bifilm::kernels::active().name << "\n";
    std::cout << "samples " << res.records.size() << "\n";
    if (res.failed) {
        std::cout << "integration FAILED: " << res.failure_reason << "\n";
        std::cout << "artifacts (partial) in " << out.string() << "\n";
        return kExitError;
    }
    std::cout << "check mass " << pf(res.checks.mass) << " (rel drift "
              << bifilm::format_double(std::max(res.checks.mass_drift_f, res.checks.mass_drift_g))
              << ")\n";
    std::cout << "check entropy " << pf(res.checks.entropy) << " (excess "
              << bifilm::format_double(res.checks.entropy_excess) << ")\n";
    std::cout << "check energy1 " << pf(res.checks.energy) << " (max uptick "
              << bifilm::format_double(res.checks.energy_uptick) << ")\n";
    std::cout << "artifacts in " << out.string() << "\n";
    return res.checks.all() ? kExitOk : kExitChecks;
}

int do_sweep(const CommonArgs& args) {
    const auto cfg = make_config(args);
    const auto out = out_path(args, cfg);
    const auto rep = bifilm::sweep_eps(cfg, out);
    for (const auto& r : rep.rows)
        std::cout << "eps " << bifilm::format_double(r.eps) << ": "
                  << (r.completed ? "completed" : "FAILED") << ", neg "
                  << bifilm::format_double(r.neg_magnitude) << ", entropy " << pf(r.entropy_ok)
                  << ", node bound " << pf(r.node_bound_ok) << "\n";
    std::cout << "negativity monotone in eps: " << pf(rep.monotone) << "\n";
    if (rep.slope)
        std::cout << "log-log slope " << bifilm::format_double(*rep.slope) << "\n";
    std::cout << "artifacts in " << out.string() << "\n";
    return rep.ok() ? kExitOk : kExitChecks;
}

int do_refine(const CommonArgs& args) {
    const auto cfg = make_config(args);
    const auto out = out_path(args, cfg);
    const auto rep = bifilm::refine_study(cfg, out);
    std::cout << "endpoint diffs:";
    for (double d : rep.endpoint_diffs) std::cout << ' ' << bifilm::format_double(d);
    std::cout << "\ndecreasing " << pf(rep.decreasing) << "\n";
    if (rep.order) std::cout << "observed order " << bifilm::format_double(*rep.order) << "\n";
    std::cout << "weak residuals:";
    for (double r : rep.residual_norms) std::cout << ' ' << bifilm::format_double(r);
    std::cout << "\nresidual decreasing " << pf(rep.residual_decreasing) << "\n";
    std::cout << "artifacts in " << out.string() << "\n";
    return rep.ok() ? kExitOk : kExitChecks;
}

int do_tfe(const CommonArgs& args) {
    const auto cfg = make_config(args);
    const auto out = out_path(args, cfg);
    const auto rep = bifilm::tfe_check(cfg, out);
    for (const auto& r : rep.rows)
        std::cout << "eps " << bifilm::format_double(r.eps) << ": sup|f| "
                  << bifilm::format_double(r.sup_f) << ", sup|g_coupled - g_single| "
                  << bifilm::format_double(r.sup_g_diff) << "\n";
    std::cout << "upper layer scales with eps: " << pf(rep.scaling_ok) << "\n";
    std::cout << "artifacts in " << out.string() << "\n";
    return rep.ok() ? kExitOk : kExitChecks;
}

int do_decay(const CommonArgs& args) {
    const auto cfg = make_config(args);
    const auto out = out_path(args, cfg);
    const auto rep = bifilm::decay_check(cfg, out);
    if (rep.stationary) {
        std::cout << "amp = 0: exact equilibrium held\n";
        return kExitOk;
    }
    std::cout << "lambda_fast exact " << bifilm::format_double(rep.oracle.lambda_fast)
              << " measured " << bifilm::format_double(rep.lambda_fast_measured) << " rel err "
              << bifilm::format_double(rep.rel_err_fast) << "\n";
    std::cout << "lambda_slow exact " << bifilm::format_double(rep.oracle.lambda_slow)
              << " measured " << bifilm::format_double(rep.lambda_slow_measured) << " rel err "
              << bifilm::format_double(rep.rel_err_slow) << "\n";
    std::cout << "positivity " << pf(rep.positivity_ok) << "\n";
    std::cout << "artifacts in " << out.string() << "\n";
    return rep.ok() ? kExitOk : kExitChecks;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral simulator for two coupled thin fluid layers"};
    app.require_subcommand(1);

    CommonArgs a_run, a_sweep, a_refine, a_tfe, a_decay;
    auto* c_run = app.add_subcommand(
        "run", "integrate one configuration and apply the structural checks");
    add_common(c_run, a_run);
    auto* c_sweep = app.add_subcommand(
        "sweep-eps", "repeat a run over sweep.eps_list and track the negativity");
    add_common(c_sweep, a_sweep);
    auto* c_refine = app.add_subcommand(
        "refine", "resolution refinement plus the weak-form residual series");
    add_common(c_refine, a_refine);
    auto* c_tfe = app.add_subcommand(
        "tfe-check", "vanishing upper layer: compare against the single-layer reduction");
    add_common(c_tfe, a_tfe);
    auto* c_decay = app.add_subcommand(
        "decay-check", "measure linearized decay rates against the closed form");
    add_common(c_decay, a_decay);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed()) return do_run(a_run);
        if (c_sweep->parsed()) return do_sweep(a_sweep);
        if (c_refine->parsed()) return do_refine(a_refine);
        if (c_tfe->parsed()) return do_tfe(a_tfe);
        if (c_decay->parsed()) return do_decay(a_decay);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;  // unreachable with require_subcommand(1)
}
