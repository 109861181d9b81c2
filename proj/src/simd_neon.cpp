#include "nbrshap/simd.hpp"

// NEON variants (aarch64). Two float64x2 accumulators stand in for lanes
// {0,1} and {2,3} of the canonical 4-lane scheme, so results match the
// scalar reference bit for bit.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace nbrshap::simd::detail {
namespace {

inline double hsum4(float64x2_t lo, float64x2_t hi) {
    const double l0 = vgetq_lane_f64(lo, 0);
    const double l1 = vgetq_lane_f64(lo, 1);
    const double l2 = vgetq_lane_f64(hi, 0);
    const double l3 = vgetq_lane_f64(hi, 1);
    return (l0 + l1) + (l2 + l3);
}

double sum_impl(const double* a, std::size_t n) {
    float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        lo = vaddq_f64(lo, vld1q_f64(a + i));
        hi = vaddq_f64(hi, vld1q_f64(a + i + 2));
    }
    double total = hsum4(lo, hi);
    for (std::size_t i = body; i < n; ++i) total += a[i];
    return total;
}

double dot_impl(const double* a, const double* b, std::size_t n) {
    float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        lo = vfmaq_f64(lo, vld1q_f64(a + i), vld1q_f64(b + i));
        hi = vfmaq_f64(hi, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double total = hsum4(lo, hi);
    for (std::size_t i = body; i < n; ++i) total = std::fma(a[i], b[i], total);
    return total;
}

double sum_sq_dev_impl(const double* f, std::size_t n, double mu) {
    const float64x2_t vmu = vdupq_n_f64(mu);
    float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        const float64x2_t d0 = vsubq_f64(vld1q_f64(f + i), vmu);
        const float64x2_t d1 = vsubq_f64(vld1q_f64(f + i + 2), vmu);
        lo = vfmaq_f64(lo, d0, d0);
        hi = vfmaq_f64(hi, d1, d1);
    }
    double total = hsum4(lo, hi);
    for (std::size_t i = body; i < n; ++i) {
        const double d = f[i] - mu;
        total = std::fma(d, d, total);
    }
    return total;
}

double dot_sq_dev_impl(const double* d, const double* f, std::size_t n, double mu) {
    const float64x2_t vmu = vdupq_n_f64(mu);
    float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        const float64x2_t t0 =
            vmulq_f64(vld1q_f64(d + i), vsubq_f64(vld1q_f64(f + i), vmu));
        const float64x2_t t1 =
            vmulq_f64(vld1q_f64(d + i + 2), vsubq_f64(vld1q_f64(f + i + 2), vmu));
        lo = vfmaq_f64(lo, t0, t0);
        hi = vfmaq_f64(hi, t1, t1);
    }
    double total = hsum4(lo, hi);
    for (std::size_t i = body; i < n; ++i) {
        const double t = d[i] * (f[i] - mu);
        total = std::fma(t, t, total);
    }
    return total;
}

void sq_dist_cont_acc_impl(double* acc, const double* col, std::size_t n, double x,
                           double scale) {
    const float64x2_t vx = vdupq_n_f64(x);
    const float64x2_t vs = vdupq_n_f64(scale);
    const std::size_t body = n & ~std::size_t{1};
    for (std::size_t i = 0; i < body; i += 2) {
        const float64x2_t t = vmulq_f64(vsubq_f64(vld1q_f64(col + i), vx), vs);
        vst1q_f64(acc + i, vfmaq_f64(vld1q_f64(acc + i), t, t));
    }
    for (std::size_t i = body; i < n; ++i) {
        const double t = (col[i] - x) * scale;
        acc[i] = std::fma(t, t, acc[i]);
    }
}

void sq_dist_cat_acc_impl(double* acc, const double* col, std::size_t n, double x,
                          double w) {
    const float64x2_t vx = vdupq_n_f64(x);
    const float64x2_t vw = vdupq_n_f64(w);
    const std::size_t body = n & ~std::size_t{1};
    for (std::size_t i = 0; i < body; i += 2) {
        const uint64x2_t eq = vceqq_f64(vld1q_f64(col + i), vx);
        const float64x2_t term = vbslq_f64(eq, vdupq_n_f64(0.0), vw);
        vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), term));
    }
    for (std::size_t i = body; i < n; ++i) {
        acc[i] += (col[i] != x) ? w : 0.0;
    }
}

}  // namespace

const Kernels* neon_kernels() {
    static const Kernels k{sum_impl,        dot_impl,
                           sum_sq_dev_impl, dot_sq_dev_impl,
                           sq_dist_cont_acc_impl, sq_dist_cat_acc_impl};
    return &k;
}

}  // namespace nbrshap::simd::detail

#else

namespace nbrshap::simd::detail {
const Kernels* neon_kernels() { return nullptr; }
}  // namespace nbrshap::simd::detail

#endif
