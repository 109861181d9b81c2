#pragma once

#include <cstdint>
#include <vector>

#include "nbrshap/rng.hpp"
#include "nbrshap/types.hpp"

namespace nbrshap {

// All 2^M subsets in mask-ascending order. Guarded at M <= 20.
std::vector<Coalition> enumerate_coalitions(std::size_t m);

// Probability of drawing a particular S of the given size from the Shapley
// coalition distribution over S subset of {1..M}\{j}:
//   |S|! (M-|S|-1)! / M!  =  1 / (M * binom(M-1, |S|))
// Sums to one over all such S and puts equal mass on every size class.
double shapley_subset_weight(std::size_t m, std::size_t subset_size);

// Shapley kernel pi(S) used as the KernelSHAP regression weight:
//   (M-1) / (binom(M,|S|) * |S| * (M-|S|)).
// Size 0 and M have infinite weight; they enter as constraints instead.
double kernelshap_weight(std::size_t m, std::size_t size);

struct CoalitionSample {
    std::vector<Coalition> coalitions;  // proper nonempty subsets, mask-ascending
    std::vector<double> reg_weight;     // pi(S) when exhaustive, multiplicity otherwise
    bool exhaustive = false;
};

// C coalitions with probability proportional to pi over proper subsets,
// drawn in complement pairs, duplicates merged with multiplicity folded
// into reg_weight. Requesting C >= 2^M - 2 switches to the deterministic
// complete enumeration with exact pi weights.
CoalitionSample sample_coalitions(std::size_t m, std::size_t c, const Rng& rng);

}  // namespace nbrshap
