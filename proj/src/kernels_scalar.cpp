#include "bifilm/kernels.hpp"

#include <limits>

// Reference lane. Plain single-accumulator loops; the AVX2 lane is equivalence-tested
// against these (exactly for elementwise ops, to rounding for reductions).

namespace bifilm::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t len) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += a[i] * b[i];
    return s;
}

double dot3_scalar(const double* a, const double* b, const double* c, std::size_t len) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += a[i] * b[i] * c[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t len) noexcept {
    for (std::size_t i = 0; i < len; ++i) y[i] += alpha * x[i];
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t len) noexcept {
    for (std::size_t i = 0; i < len; ++i) out[i] = a[i] * b[i];
}

void mobility_cutoff_scalar(const double* s, double eps, double* out, std::size_t len) noexcept {
    for (std::size_t i = 0; i < len; ++i) out[i] = (s[i] > 0.0 ? s[i] : 0.0) + eps;
}

double min_value_scalar(const double* a, std::size_t len) noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < len; ++i)
        if (a[i] < m) m = a[i];
    return m;
}

double max_value_scalar(const double* a, std::size_t len) noexcept {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < len; ++i)
        if (a[i] > m) m = a[i];
    return m;
}

}  // namespace

const Ops& scalar_ops() noexcept {
    static const Ops ops{dot_scalar, dot3_scalar, axpy_scalar, mul_scalar,
                         mobility_cutoff_scalar, min_value_scalar, max_value_scalar,
                         "scalar"};
    return ops;
}

}  // namespace bifilm::kernels
