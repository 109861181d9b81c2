#pragma once

#include <cstdint>
#include <string>

#include "nbrshap/estimators.hpp"

namespace nbrshap {

struct FidelityReport {
    double weighted_mse = 0.0;
    std::size_t n_samples = 0;
    double eval_sigma = 0.0;
    std::string attribution_id;
};

// Local-fidelity harness: sample n (S_i, x*_i) pairs (coalition size uniform
// on {0..M-1}, subset uniform, reference uniform), predict the masked output
// with the binary explanation model g(S) = phi0 + sum_{j in S} phi_j, and
// report the MSE weighted by u_i = exp(-D(x, x*_i)^2 / eval_sigma^2).
//
// With a single reference row whose attribution came from that same row and
// a linear black box, g matches every masked output exactly and the MSE is
// zero up to rounding.
FidelityReport local_fidelity(const Attribution& attr, const BlackBox& bb,
                              EvalLedger& ledger, const Instance& x, const Dataset& refs,
                              double eval_sigma, std::size_t n, const Rng& rng);

}  // namespace nbrshap
