#include "nbrshap/simd.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace nbrshap::simd {
namespace {

struct Dispatch {
    const detail::Kernels* kernels;
    Isa isa;
};

Dispatch pick(Isa isa) {
    switch (isa) {
        case Isa::avx2:
            if (const auto* k = detail::avx2_kernels()) return {k, Isa::avx2};
            throw std::runtime_error("avx2 kernels unavailable on this CPU");
        case Isa::neon:
            if (const auto* k = detail::neon_kernels()) return {k, Isa::neon};
            throw std::runtime_error("neon kernels unavailable on this CPU");
        case Isa::scalar:
            return {&detail::scalar_kernels(), Isa::scalar};
    }
    return {&detail::scalar_kernels(), Isa::scalar};
}

Dispatch pick_default() {
    if (const char* env = std::getenv("NBRSHAP_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return pick(Isa::scalar);
        if (std::strcmp(env, "avx2") == 0) return pick(Isa::avx2);
        if (std::strcmp(env, "neon") == 0) return pick(Isa::neon);
    }
    if (const auto* k = detail::avx2_kernels()) return {k, Isa::avx2};
    if (const auto* k = detail::neon_kernels()) return {k, Isa::neon};
    return {&detail::scalar_kernels(), Isa::scalar};
}

Dispatch& state() {
    static Dispatch d = pick_default();
    return d;
}

}  // namespace

Isa active() { return state().isa; }

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "scalar";
}

void force(Isa isa) { state() = pick(isa); }

double sum(const double* a, std::size_t n) { return state().kernels->sum(a, n); }

double dot(const double* a, const double* b, std::size_t n) {
    return state().kernels->dot(a, b, n);
}

double sum_sq_dev(const double* f, std::size_t n, double mu) {
    return state().kernels->sum_sq_dev(f, n, mu);
}

double dot_sq_dev(const double* d, const double* f, std::size_t n, double mu) {
    return state().kernels->dot_sq_dev(d, f, n, mu);
}

void sq_dist_cont_acc(double* acc, const double* col, std::size_t n, double x,
                      double scale) {
    state().kernels->sq_dist_cont_acc(acc, col, n, x, scale);
}

void sq_dist_cat_acc(double* acc, const double* col, std::size_t n, double x, double w) {
    state().kernels->sq_dist_cat_acc(acc, col, n, x, w);
}

}  // namespace nbrshap::simd
