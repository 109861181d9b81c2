#pragma once

#include <cstddef>
#include <string>

namespace nbrshap::simd {

// Vector kernels for the arithmetic inner loops: squared-distance
// accumulation over reference columns and weighted reductions over
// references. Each kernel has a scalar reference implementation and an
// AVX2 (x86-64) / NEON (aarch64) variant selected once at runtime.
//
// All variants compute bit-identical results. Reductions use a fixed
// 4-accumulator blocked FMA scheme: lane k accumulates elements 4i+k with
// fused multiply-add, the lanes combine as (l0+l1)+(l2+l3), and the tail
// (n mod 4 elements) folds into the total sequentially. std::fma and the
// vfmadd/vfma instructions round identically, so scalar and SIMD paths
// agree exactly and results do not depend on the dispatch choice.

enum class Isa { scalar, avx2, neon };

Isa active();
const char* isa_name(Isa isa);

// Force a specific implementation (tests); throws if unsupported on this CPU.
// The environment variable NBRSHAP_SIMD=scalar|avx2|neon does the same.
void force(Isa isa);

// sum of a[0..n)
double sum(const double* a, std::size_t n);

// dot product sum a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);

// sum (f[i]-mu)^2
double sum_sq_dev(const double* f, std::size_t n, double mu);

// sum (d[i]*(f[i]-mu))^2  -- self-normalised IS variance numerator
double dot_sq_dev(const double* d, const double* f, std::size_t n, double mu);

// acc[i] += ((col[i]-x)*scale)^2   -- continuous feature distance term
void sq_dist_cont_acc(double* acc, const double* col, std::size_t n, double x, double scale);

// acc[i] += (col[i]!=x) ? w : 0    -- categorical feature distance term
void sq_dist_cat_acc(double* acc, const double* col, std::size_t n, double x, double w);

// Per-implementation entry points (exposed for equivalence tests).
namespace detail {
struct Kernels {
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum_sq_dev)(const double*, std::size_t, double);
    double (*dot_sq_dev)(const double*, const double*, std::size_t, double);
    void (*sq_dist_cont_acc)(double*, const double*, std::size_t, double, double);
    void (*sq_dist_cat_acc)(double*, const double*, std::size_t, double, double);
};
const Kernels& scalar_kernels();
const Kernels* avx2_kernels();  // nullptr when not compiled in or unsupported
const Kernels* neon_kernels();
}  // namespace detail

}  // namespace nbrshap::simd
