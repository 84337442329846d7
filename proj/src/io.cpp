#include "bifilm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "bifilm/errors.hpp"

namespace bifilm {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
}

long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for " + key + ": '" + v + "'");
    }
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> items;
    std::string cur;
    std::istringstream in(v);
    while (std::getline(in, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) items.push_back(cur);
    }
    return items;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const auto& item : split_list(v)) out.push_back(static_cast<int>(parse_int(key, item)));
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

Scheme parse_scheme(const std::string& v) {
    if (v == "semi_implicit_spectral") return Scheme::semi_implicit_spectral;
    if (v == "fully_implicit_euler") return Scheme::fully_implicit_euler;
    if (v == "explicit_adaptive") return Scheme::explicit_adaptive;
    throw ConfigError("unknown scheme: " + v);
}

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::semi_implicit_spectral: return "semi_implicit_spectral";
        case Scheme::fully_implicit_euler: return "fully_implicit_euler";
        case Scheme::explicit_adaptive: return "explicit_adaptive";
    }
    return "?";
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += format_double(v[i]);
    }
    return s;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    // flat dotted keys; every settable field of RunConfig appears here
    if (key == "n") cfg.n = static_cast<int>(parse_int(key, value));
    else if (key == "eps") cfg.eps = parse_double(key, value);
    else if (key == "M") cfg.M = static_cast<int>(parse_int(key, value));
    else if (key == "phys.A") cfg.A = parse_double(key, value);
    else if (key == "phys.B") cfg.B = parse_double(key, value);
    else if (key == "phys.L") cfg.L = parse_double(key, value);
    else if (key == "T_end") cfg.T_end = parse_double(key, value);
    else if (key == "sample_count") cfg.sample_count = static_cast<int>(parse_int(key, value));
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "seed") cfg.seed = static_cast<unsigned long>(parse_int(key, value));
    else if (key == "simd") cfg.simd = value;
    else if (key == "controls.scheme") cfg.controls.scheme = parse_scheme(value);
    else if (key == "controls.rel_tol") cfg.controls.rel_tol = parse_double(key, value);
    else if (key == "controls.abs_tol") cfg.controls.abs_tol = parse_double(key, value);
    else if (key == "controls.dt_init") cfg.controls.dt_init = parse_double(key, value);
    else if (key == "controls.dt_min") cfg.controls.dt_min = parse_double(key, value);
    else if (key == "controls.dt_max") cfg.controls.dt_max = parse_double(key, value);
    else if (key == "controls.max_newton_iters")
        cfg.controls.max_newton_iters = static_cast<int>(parse_int(key, value));
    else if (key == "initial.kind") cfg.initial.kind = parse_initial_kind(value);
    else if (key == "initial.f_level") cfg.initial.f_level = parse_double(key, value);
    else if (key == "initial.g_level") cfg.initial.g_level = parse_double(key, value);
    else if (key == "initial.f_amp") cfg.initial.f_amp = parse_double(key, value);
    else if (key == "initial.g_amp") cfg.initial.g_amp = parse_double(key, value);
    else if (key == "initial.f_mode") cfg.initial.f_mode = static_cast<int>(parse_int(key, value));
    else if (key == "initial.g_mode") cfg.initial.g_mode = static_cast<int>(parse_int(key, value));
    else if (key == "initial.f_center") cfg.initial.f_center = parse_double(key, value);
    else if (key == "initial.g_center") cfg.initial.g_center = parse_double(key, value);
    else if (key == "initial.f_width") cfg.initial.f_width = parse_double(key, value);
    else if (key == "initial.g_width") cfg.initial.g_width = parse_double(key, value);
    else if (key == "initial.f_bump_amp") cfg.initial.f_bump_amp = parse_double(key, value);
    else if (key == "initial.g_bump_amp") cfg.initial.g_bump_amp = parse_double(key, value);
    else if (key == "initial.f_coeffs") cfg.initial.f_coeffs = parse_double_list(key, value);
    else if (key == "initial.g_coeffs") cfg.initial.g_coeffs = parse_double_list(key, value);
    else if (key == "initial.f_file") cfg.initial.f_file = value;
    else if (key == "initial.g_file") cfg.initial.g_file = value;
    else if (key == "sweep.eps_list") cfg.sweep.eps_list = parse_double_list(key, value);
    else if (key == "refine.n_list") cfg.refine.n_list = parse_int_list(key, value);
    else if (key == "refine.residual_eps") cfg.refine.residual_eps = parse_double_list(key, value);
    else if (key == "refine.residual_samples")
        cfg.refine.residual_samples = parse_int_list(key, value);
    else if (key == "tfe.eps_list") cfg.tfe.eps_list = parse_double_list(key, value);
    else if (key == "tfe.T") cfg.tfe.T = parse_double(key, value);
    else if (key == "decay.mode") cfg.decay.mode = static_cast<int>(parse_int(key, value));
    else if (key == "decay.f_level") cfg.decay.f_level = parse_double(key, value);
    else if (key == "decay.g_level") cfg.decay.g_level = parse_double(key, value);
    else if (key == "decay.amp") cfg.decay.amp = parse_double(key, value);
    else if (key == "decay.sample_count")
        cfg.decay.sample_count = static_cast<int>(parse_int(key, value));
    else throw ConfigError("unknown config key: " + key);
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                                           ": empty key");
        set_key(cfg, key, value);
    }
    return cfg;
}

void apply_override(RunConfig& cfg, const std::string& key_equals_value) {
    const auto eq = key_equals_value.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must be key=value: " + key_equals_value);
    set_key(cfg, trim(key_equals_value.substr(0, eq)), trim(key_equals_value.substr(eq + 1)));
}

std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("n", std::to_string(cfg.n));
    kv.emplace_back("eps", format_double(cfg.eps));
    kv.emplace_back("M", std::to_string(cfg.resolved_panels()));
    kv.emplace_back("phys.A", format_double(cfg.A));
    kv.emplace_back("phys.B", format_double(cfg.B));
    kv.emplace_back("phys.L", format_double(cfg.L));
    kv.emplace_back("T_end", format_double(cfg.T_end));
    kv.emplace_back("sample_count", std::to_string(cfg.sample_count));
    kv.emplace_back("seed", std::to_string(cfg.seed));
    kv.emplace_back("simd", cfg.simd);
    kv.emplace_back("controls.scheme", scheme_name(cfg.controls.scheme));
    kv.emplace_back("controls.rel_tol", format_double(cfg.controls.rel_tol));
    kv.emplace_back("controls.abs_tol", format_double(cfg.controls.abs_tol));
    kv.emplace_back("controls.dt_init", format_double(cfg.controls.dt_init));
    kv.emplace_back("controls.dt_min", format_double(cfg.controls.dt_min));
    kv.emplace_back("controls.dt_max", format_double(cfg.controls.dt_max));
    kv.emplace_back("controls.max_newton_iters", std::to_string(cfg.controls.max_newton_iters));
    kv.emplace_back("initial.kind", to_string(cfg.initial.kind));
    switch (cfg.initial.kind) {
        case InitialKind::flat:
            kv.emplace_back("initial.f_level", format_double(cfg.initial.f_level));
            kv.emplace_back("initial.g_level", format_double(cfg.initial.g_level));
            break;
        case InitialKind::cosine_bump:
            kv.emplace_back("initial.f_level", format_double(cfg.initial.f_level));
            kv.emplace_back("initial.g_level", format_double(cfg.initial.g_level));
            kv.emplace_back("initial.f_amp", format_double(cfg.initial.f_amp));
            kv.emplace_back("initial.g_amp", format_double(cfg.initial.g_amp));
            kv.emplace_back("initial.f_mode", std::to_string(cfg.initial.f_mode));
            kv.emplace_back("initial.g_mode", std::to_string(cfg.initial.g_mode));
            break;
        case InitialKind::compact_support_touching_zero:
            kv.emplace_back("initial.f_bump_amp", format_double(cfg.initial.f_bump_amp));
            kv.emplace_back("initial.g_bump_amp", format_double(cfg.initial.g_bump_amp));
            kv.emplace_back("initial.f_center", format_double(cfg.initial.f_center));
            kv.emplace_back("initial.g_center", format_double(cfg.initial.g_center));
            kv.emplace_back("initial.f_width", format_double(cfg.initial.f_width));
            kv.emplace_back("initial.g_width", format_double(cfg.initial.g_width));
            break;
        case InitialKind::coefficients:
            kv.emplace_back("initial.f_coeffs", join_doubles(cfg.initial.f_coeffs));
            kv.emplace_back("initial.g_coeffs", join_doubles(cfg.initial.g_coeffs));
            break;
        case InitialKind::tabulated:
            kv.emplace_back("initial.f_file", cfg.initial.f_file);
            kv.emplace_back("initial.g_file", cfg.initial.g_file);
            break;
    }
    kv.emplace_back("sweep.eps_list", join_doubles(cfg.sweep.eps_list));
    kv.emplace_back("refine.n_list", join_ints(cfg.refine.n_list));
    kv.emplace_back("refine.residual_eps", join_doubles(cfg.refine.residual_eps));
    kv.emplace_back("refine.residual_samples", join_ints(cfg.refine.residual_samples));
    kv.emplace_back("tfe.eps_list", join_doubles(cfg.tfe.eps_list));
    kv.emplace_back("tfe.T", format_double(cfg.tfe.T));
    kv.emplace_back("decay.mode", std::to_string(cfg.decay.mode));
    kv.emplace_back("decay.f_level", format_double(cfg.decay.f_level));
    kv.emplace_back("decay.g_level", format_double(cfg.decay.g_level));
    kv.emplace_back("decay.amp", format_double(cfg.decay.amp));
    kv.emplace_back("decay.sample_count", std::to_string(cfg.decay.sample_count));
    return kv;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const RunConfig& cfg) : out_(path) {
    if (!out_) throw ConfigError("cannot open output file: " + path.string());
    for (const auto& [k, v] : config_echo(cfg)) out_ << "# " << k << " = " << v << "\n";
    out_ << "t,mass_f,mass_g,E1,E2eps,E2,D1,D2,min_f,min_g,dt_last\n";
    out_.flush();
}

void CsvWriter::row(const DiagnosticsRecord& r) {
    out_ << format_double(r.t) << ',' << format_double(r.mass_f) << ','
         << format_double(r.mass_g) << ',' << format_double(r.energy1) << ','
         << format_double(r.energy2_eps) << ','
         << (r.energy2 ? format_double(*r.energy2) : std::string{}) << ','
         << format_double(r.dissipation1) << ',' << format_double(r.dissipation2) << ','
         << format_double(r.min_f) << ',' << format_double(r.min_g) << ','
         << format_double(r.dt_last) << '\n';
    out_.flush();
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open snapshot file: " + path.string());
    out << "version " << snap.version << "\n";
    out << "n " << snap.n << "\n";
    out << "L " << format_double(snap.L) << "\n";
    out << "A " << format_double(snap.A) << "\n";
    out << "B " << format_double(snap.B) << "\n";
    out << "eps " << format_double(snap.eps) << "\n";
    out << "t " << format_double(snap.state.t) << "\n";
    out << "f_coeffs";
    for (double c : snap.state.f.coeffs) out << ' ' << format_double(c);
    out << "\n";
    out << "g_coeffs";
    for (double c : snap.state.g.coeffs) out << ' ' << format_double(c);
    out << "\n";
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open snapshot file: " + path.string());
    Snapshot snap;
    std::map<std::string, std::string> fields;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto sp = line.find(' ');
        if (sp == std::string::npos)
            throw ConfigError("malformed snapshot line in " + path.string() + ": " + line);
        fields[line.substr(0, sp)] = trim(line.substr(sp + 1));
    }
    for (const char* req : {"version", "n", "L", "A", "B", "eps", "t", "f_coeffs", "g_coeffs"})
        if (!fields.count(req))
            throw ConfigError("snapshot missing key '" + std::string(req) + "': " + path.string());
    snap.version = static_cast<int>(parse_int("version", fields["version"]));
    if (snap.version != 1) throw ConfigError("unsupported snapshot version");
    snap.n = static_cast<int>(parse_int("n", fields["n"]));
    snap.L = parse_double("L", fields["L"]);
    snap.A = parse_double("A", fields["A"]);
    snap.B = parse_double("B", fields["B"]);
    snap.eps = parse_double("eps", fields["eps"]);
    snap.state.t = parse_double("t", fields["t"]);
    auto parse_coeffs = [&](const std::string& text) {
        std::vector<double> v;
        std::istringstream is(text);
        std::string tok;
        while (is >> tok) v.push_back(parse_double("coeffs", tok));
        return v;
    };
    snap.state.f.coeffs = parse_coeffs(fields["f_coeffs"]);
    snap.state.g.coeffs = parse_coeffs(fields["g_coeffs"]);
    snap.state.f.length = snap.L;
    snap.state.g.length = snap.L;
    if (snap.state.f.coeffs.size() != static_cast<std::size_t>(snap.n + 1) ||
        snap.state.g.coeffs.size() != static_cast<std::size_t>(snap.n + 1))
        throw ConfigError("snapshot coefficient count does not match n");
    return snap;
}

std::vector<double> read_values_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open data file: " + path.string());
    std::vector<double> v;
    std::string tok;
    while (in >> tok) v.push_back(parse_double(path.string(), tok));
    if (v.empty()) throw ConfigError("no values in data file: " + path.string());
    return v;
}

}  // namespace bifilm
