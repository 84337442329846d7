#pragma once

#include <stdexcept>
#include <string>

namespace bifilm {

// Bad configuration file contents, inconsistent run parameters, unusable CLI input.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A non-finite value appeared while assembling the vector field. `mode` is the
// first offending coefficient index (-1 if the overflow was in grid data).
class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(const std::string& what, int mode_index)
        : std::runtime_error(what + " (mode " + std::to_string(mode_index) + ")"),
          mode(mode_index) {}
    int mode;
};

}  // namespace bifilm
