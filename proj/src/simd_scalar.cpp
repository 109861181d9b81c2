#include "nbrshap/simd.hpp"

#include <cmath>

// Scalar reference kernels. These spell out the exact blocked-FMA reduction
// order the SIMD variants implement, so equality between paths is exact.

namespace nbrshap::simd::detail {
namespace {

double sum_impl(const double* a, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        acc[0] += a[i + 0];
        acc[1] += a[i + 1];
        acc[2] += a[i + 2];
        acc[3] += a[i + 3];
    }
    double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (std::size_t i = body; i < n; ++i) total += a[i];
    return total;
}

double dot_impl(const double* a, const double* b, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        acc[0] = std::fma(a[i + 0], b[i + 0], acc[0]);
        acc[1] = std::fma(a[i + 1], b[i + 1], acc[1]);
        acc[2] = std::fma(a[i + 2], b[i + 2], acc[2]);
        acc[3] = std::fma(a[i + 3], b[i + 3], acc[3]);
    }
    double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (std::size_t i = body; i < n; ++i) total = std::fma(a[i], b[i], total);
    return total;
}

double sum_sq_dev_impl(const double* f, std::size_t n, double mu) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        const double d0 = f[i + 0] - mu;
        const double d1 = f[i + 1] - mu;
        const double d2 = f[i + 2] - mu;
        const double d3 = f[i + 3] - mu;
        acc[0] = std::fma(d0, d0, acc[0]);
        acc[1] = std::fma(d1, d1, acc[1]);
        acc[2] = std::fma(d2, d2, acc[2]);
        acc[3] = std::fma(d3, d3, acc[3]);
    }
    double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (std::size_t i = body; i < n; ++i) {
        const double d = f[i] - mu;
        total = std::fma(d, d, total);
    }
    return total;
}

double dot_sq_dev_impl(const double* d, const double* f, std::size_t n, double mu) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        const double t0 = d[i + 0] * (f[i + 0] - mu);
        const double t1 = d[i + 1] * (f[i + 1] - mu);
        const double t2 = d[i + 2] * (f[i + 2] - mu);
        const double t3 = d[i + 3] * (f[i + 3] - mu);
        acc[0] = std::fma(t0, t0, acc[0]);
        acc[1] = std::fma(t1, t1, acc[1]);
        acc[2] = std::fma(t2, t2, acc[2]);
        acc[3] = std::fma(t3, t3, acc[3]);
    }
    double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (std::size_t i = body; i < n; ++i) {
        const double t = d[i] * (f[i] - mu);
        total = std::fma(t, t, total);
    }
    return total;
}

void sq_dist_cont_acc_impl(double* acc, const double* col, std::size_t n, double x,
                           double scale) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (col[i] - x) * scale;
        acc[i] = std::fma(t, t, acc[i]);
    }
}

void sq_dist_cat_acc_impl(double* acc, const double* col, std::size_t n, double x,
                          double w) {
    for (std::size_t i = 0; i < n; ++i) {
        acc[i] += (col[i] != x) ? w : 0.0;
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{sum_impl,        dot_impl,
                           sum_sq_dev_impl, dot_sq_dev_impl,
                           sq_dist_cont_acc_impl, sq_dist_cat_acc_impl};
    return k;
}

}  // namespace nbrshap::simd::detail
