#include "bifilm/run_config.hpp"

#include <cmath>

#include "bifilm/errors.hpp"

namespace bifilm {

InitialKind parse_initial_kind(const std::string& name) {
    if (name == "flat") return InitialKind::flat;
    if (name == "cosine_bump") return InitialKind::cosine_bump;
    if (name == "compact_support_touching_zero") return InitialKind::compact_support_touching_zero;
    if (name == "coefficients") return InitialKind::coefficients;
    if (name == "tabulated") return InitialKind::tabulated;
    throw ConfigError("unknown initial data kind: " + name);
}

std::string to_string(InitialKind kind) {
    switch (kind) {
        case InitialKind::flat: return "flat";
        case InitialKind::cosine_bump: return "cosine_bump";
        case InitialKind::compact_support_touching_zero: return "compact_support_touching_zero";
        case InitialKind::coefficients: return "coefficients";
        case InitialKind::tabulated: return "tabulated";
    }
    return "?";
}

void RunConfig::validate() const {
    if (n < 1) throw ConfigError("mode count n must be at least 1");
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("eps must lie in (0, 1]");
    const int panels = resolved_panels();
    if (panels < 4 * (n + 1))
        throw ConfigError("quadrature too coarse: need M >= 4(n+1) = " +
                          std::to_string(4 * (n + 1)) + ", got " + std::to_string(panels));
    if (!(std::isfinite(A) && std::isfinite(B) && B > 0.0 && A > B))
        throw ConfigError("coupling constants must satisfy A > B > 0");
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("domain length must be positive");
    if (!(T_end >= 0.0) || !std::isfinite(T_end)) throw ConfigError("T_end must be >= 0");
    if (sample_count < 1 || (T_end > 0.0 && sample_count < 2))
        throw ConfigError("sample_count must be >= 2 for a positive horizon");
    controls.validate();

    const auto& init = initial;
    switch (init.kind) {
        case InitialKind::flat:
            if (init.f_level < 0.0 || init.g_level < 0.0)
                throw ConfigError("flat initial levels must be non-negative");
            break;
        case InitialKind::cosine_bump:
            if (init.f_level < std::abs(init.f_amp) || init.g_level < std::abs(init.g_amp))
                throw ConfigError("cosine bump would be negative: need level >= |amp|");
            if ((init.f_amp != 0.0 && (init.f_mode < 1 || init.f_mode > n)) ||
                (init.g_amp != 0.0 && (init.g_mode < 1 || init.g_mode > n)))
                throw ConfigError("cosine bump mode outside 1..n");
            break;
        case InitialKind::compact_support_touching_zero:
            if (init.f_bump_amp < 0.0 || init.g_bump_amp < 0.0)
                throw ConfigError("bump amplitudes must be non-negative");
            if (!(init.f_width > 0.0) || !(init.g_width > 0.0))
                throw ConfigError("bump widths must be positive");
            break;
        case InitialKind::coefficients:
            if (static_cast<int>(init.f_coeffs.size()) > n + 1 ||
                static_cast<int>(init.g_coeffs.size()) > n + 1)
                throw ConfigError("more initial coefficients than modes");
            break;
        case InitialKind::tabulated:
            if (init.f_file.empty() || init.g_file.empty())
                throw ConfigError("tabulated initial data needs initial.f_file and initial.g_file");
            break;
    }
}

}  // namespace bifilm
