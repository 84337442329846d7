#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bifilm/diagnostics.hpp"
#include "bifilm/run_config.hpp"

namespace bifilm {

// Shortest decimal form that parses back to the identical double (std::to_chars);
// ASCII, '.' decimal point, locale-independent.
std::string format_double(double v);

// Flat "key = value" config file; '#' comments, blank lines ignored, unknown keys
// rejected. Dotted keys address nested fields (phys.A, controls.rel_tol,
// initial.kind, sweep.eps_list, ...). Lists are comma-separated.
RunConfig load_config(const std::filesystem::path& path);
void apply_override(RunConfig& cfg, const std::string& key_equals_value);

// Resolved config as ordered key/value pairs; embedded in every artifact.
std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg);

// Sampled time series. Leading '#'-comment lines carry the config echo, then the
// fixed header
//   t,mass_f,mass_g,E1,E2eps,E2,D1,D2,min_f,min_g,dt_last
// with one row per sample; E2 is the empty field when the state left the
// positive cone. Rows are appended (and flushed) as samples arrive so a failed
// run keeps everything sampled before the failure.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const RunConfig& cfg);
    void row(const DiagnosticsRecord& rec);

private:
    std::ofstream out_;
};

// Plain-text state snapshot, one "key value..." line each:
//   version, n, L, A, B, eps, t, f_coeffs, g_coeffs.
struct Snapshot {
    int version = 1;
    int n = 0;
    double L = 1.0, A = 2.0, B = 1.0, eps = 0.1;
    State state;
};
void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

std::vector<double> read_values_file(const std::filesystem::path& path);

}  // namespace bifilm
