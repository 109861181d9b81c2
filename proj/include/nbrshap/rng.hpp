#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace nbrshap {

// Splittable counter-based generator.
//
// Output i of a stream with key k is mix64(k + (i+1)*GAMMA), where mix64 is
// the SplitMix64 finalizer (Steele/Lea/Flood) and GAMMA the golden-ratio
// increment. Streams are derived from a 64-bit user seed; child(tag) derives
// an independent stream from (key, tag) only, so substreams do not depend on
// how much of the parent has been consumed. Every random decision in the
// engine flows from one root seed through named children, which makes runs
// reproducible across platforms and thread counts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(mix64(seed ^ kSalt)) {}

    Rng child(std::uint64_t tag) const { return Rng(mix64(key_ ^ mix64(tag + kSalt)), 0); }

    std::uint64_t next_u64() { return mix64(key_ + (++ctr_) * kGamma); }

    // Uniform on [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Standard normal via Box-Muller; always consumes exactly two draws.
    double normal() {
        double u1 = uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform k-subset of {0,...,pool-1}, ascending order (partial Fisher-Yates).
    std::vector<std::uint32_t> subset(std::uint32_t pool, std::uint32_t k);

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

private:
    Rng(std::uint64_t key, int) : key_(key) {}

    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kSalt = 0xD1B54A32D192ED03ULL;

    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

}  // namespace nbrshap
