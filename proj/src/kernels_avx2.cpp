#include "bifilm/kernels.hpp"

#include <limits>

// AVX2+FMA lane. This translation unit is compiled with -mavx2 -mfma on x86-64;
// callers must gate on avx2_available() before taking these entry points.

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace bifilm::kernels {
namespace {

inline double hsum(__m256d v) noexcept {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s2 = _mm_add_pd(lo, hi);
    __m128d s1 = _mm_add_sd(s2, _mm_unpackhi_pd(s2, s2));
    return _mm_cvtsd_f64(s1);
}

double dot_avx2(const double* a, const double* b, std::size_t len) noexcept {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= len; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= len; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < len; ++i) s += a[i] * b[i];
    return s;
}

double dot3_avx2(const double* a, const double* b, const double* c, std::size_t len) noexcept {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(ab, _mm256_loadu_pd(c + i), acc);
    }
    double s = hsum(acc);
    for (; i < len; ++i) s += a[i] * b[i] * c[i];
    return s;
}

// mul+add, not fmadd: elementwise results must match the scalar lane bitwise
// (this TU is also built with -ffp-contract=off so the tail cannot fuse).
void axpy_avx2(double alpha, const double* x, double* y, std::size_t len) noexcept {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        __m256d p = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(p, _mm256_loadu_pd(y + i)));
    }
    for (; i < len; ++i) y[i] += alpha * x[i];
}

void mul_avx2(const double* a, const double* b, double* out, std::size_t len) noexcept {
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < len; ++i) out[i] = a[i] * b[i];
}

void mobility_cutoff_avx2(const double* s, double eps, double* out, std::size_t len) noexcept {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d veps = _mm256_set1_pd(eps);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        __m256d v = _mm256_max_pd(_mm256_loadu_pd(s + i), zero);
        _mm256_storeu_pd(out + i, _mm256_add_pd(v, veps));
    }
    for (; i < len; ++i) out[i] = (s[i] > 0.0 ? s[i] : 0.0) + eps;
}

double min_value_avx2(const double* a, std::size_t len) noexcept {
    __m256d acc = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) acc = _mm256_min_pd(acc, _mm256_loadu_pd(a + i));
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d m2 = _mm_min_pd(lo, hi);
    double m = _mm_cvtsd_f64(_mm_min_sd(m2, _mm_unpackhi_pd(m2, m2)));
    for (; i < len; ++i)
        if (a[i] < m) m = a[i];
    return m;
}

double max_value_avx2(const double* a, std::size_t len) noexcept {
    __m256d acc = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(a + i));
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d m2 = _mm_max_pd(lo, hi);
    double m = _mm_cvtsd_f64(_mm_max_sd(m2, _mm_unpackhi_pd(m2, m2)));
    for (; i < len; ++i)
        if (a[i] > m) m = a[i];
    return m;
}

}  // namespace

const Ops& avx2_ops() noexcept {
    static const Ops ops{dot_avx2, dot3_avx2, axpy_avx2, mul_avx2,
                         mobility_cutoff_avx2, min_value_avx2, max_value_avx2,
                         "avx2"};
    return ops;
}

}  // namespace bifilm::kernels

#else  // no AVX2 at compile time: keep the symbol, route to the reference lane

namespace bifilm::kernels {

const Ops& avx2_ops() noexcept { return scalar_ops(); }

}  // namespace bifilm::kernels

#endif
