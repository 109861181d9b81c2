#include "nbrshap/simd.hpp"

// AVX2/FMA variants. Compiled with -mavx2 -mfma for this translation unit
// only; the dispatcher checks cpu support before handing out pointers.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace nbrshap::simd::detail {
namespace {

inline double hsum(__m256d v) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, v);
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double sum_impl(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    }
    double total = hsum(acc);
    for (std::size_t i = body; i < n; ++i) total += a[i];
    return total;
}

double dot_impl(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    }
    double total = hsum(acc);
    for (std::size_t i = body; i < n; ++i) total = std::fma(a[i], b[i], total);
    return total;
}

double sum_sq_dev_impl(const double* f, std::size_t n, double mu) {
    const __m256d vmu = _mm256_set1_pd(mu);
    __m256d acc = _mm256_setzero_pd();
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(f + i), vmu);
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double total = hsum(acc);
    for (std::size_t i = body; i < n; ++i) {
        const double d = f[i] - mu;
        total = std::fma(d, d, total);
    }
    return total;
}

double dot_sq_dev_impl(const double* d, const double* f, std::size_t n, double mu) {
    const __m256d vmu = _mm256_set1_pd(mu);
    __m256d acc = _mm256_setzero_pd();
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        const __m256d t = _mm256_mul_pd(
            _mm256_loadu_pd(d + i), _mm256_sub_pd(_mm256_loadu_pd(f + i), vmu));
        acc = _mm256_fmadd_pd(t, t, acc);
    }
    double total = hsum(acc);
    for (std::size_t i = body; i < n; ++i) {
        const double t = d[i] * (f[i] - mu);
        total = std::fma(t, t, total);
    }
    return total;
}

void sq_dist_cont_acc_impl(double* acc, const double* col, std::size_t n, double x,
                           double scale) {
    const __m256d vx = _mm256_set1_pd(x);
    const __m256d vs = _mm256_set1_pd(scale);
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        const __m256d t =
            _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(col + i), vx), vs);
        _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(t, t, _mm256_loadu_pd(acc + i)));
    }
    for (std::size_t i = body; i < n; ++i) {
        const double t = (col[i] - x) * scale;
        acc[i] = std::fma(t, t, acc[i]);
    }
}

void sq_dist_cat_acc_impl(double* acc, const double* col, std::size_t n, double x,
                          double w) {
    const __m256d vx = _mm256_set1_pd(x);
    const __m256d vw = _mm256_set1_pd(w);
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        const __m256d neq = _mm256_cmp_pd(_mm256_loadu_pd(col + i), vx, _CMP_NEQ_OQ);
        const __m256d term = _mm256_and_pd(neq, vw);
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), term));
    }
    for (std::size_t i = body; i < n; ++i) {
        acc[i] += (col[i] != x) ? w : 0.0;
    }
}

}  // namespace

const Kernels* avx2_kernels() {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return nullptr;
    static const Kernels k{sum_impl,        dot_impl,
                           sum_sq_dev_impl, dot_sq_dev_impl,
                           sq_dist_cont_acc_impl, sq_dist_cat_acc_impl};
    return &k;
}

}  // namespace nbrshap::simd::detail

#else

namespace nbrshap::simd::detail {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace nbrshap::simd::detail

#endif
