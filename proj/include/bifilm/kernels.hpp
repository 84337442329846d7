#pragma once

#include <cstddef>

namespace bifilm::kernels {

// Data-parallel inner loops shared by the spectral transforms and the grid-side
// nonlinear evaluations. Two lanes: a scalar reference implementation and an AVX2
// one, selected once at runtime. Inputs are assumed finite; reductions in the two
// lanes differ only by summation order.
struct Ops {
    double (*dot)(const double* a, const double* b, std::size_t len) noexcept;
    // sum_i a[i]*b[i]*c[i]
    double (*dot3)(const double* a, const double* b, const double* c, std::size_t len) noexcept;
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t len) noexcept;
    // out[i] = a[i] * b[i]
    void (*mul)(const double* a, const double* b, double* out, std::size_t len) noexcept;
    // out[i] = max(s[i], 0) + eps   (the regularized mobility, evaluated on a grid)
    void (*mobility_cutoff)(const double* s, double eps, double* out, std::size_t len) noexcept;
    double (*min_value)(const double* a, std::size_t len) noexcept;  // +inf for len == 0
    double (*max_value)(const double* a, std::size_t len) noexcept;  // -inf for len == 0
    const char* name;
};

enum class Lane { scalar, avx2 };

const Ops& scalar_ops() noexcept;
const Ops& avx2_ops() noexcept;  // valid to call only if avx2_available()
bool avx2_available() noexcept;

// Active lane: picked on first use (AVX2 when the CPU supports it, else scalar),
// overridable via the BIFILM_SIMD environment variable ("scalar"/"avx2"/"auto")
// or programmatically. Throws ConfigError for an unsatisfiable request.
const Ops& active();
Lane active_lane() noexcept;
void force_lane(Lane lane);
void reset_lane() noexcept;  // back to auto-detection

}  // namespace bifilm::kernels
