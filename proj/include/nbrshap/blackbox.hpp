#pragma once

#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "nbrshap/types.hpp"

namespace nbrshap {

// Evaluation contract. Implementations must be deterministic (identical
// input matrix, identical outputs) and safe to call from several threads.
class BlackBox {
public:
    virtual ~BlackBox() = default;

    // rows: n x m row-major; out: n values.
    virtual void evaluate_batch(const double* rows, std::size_t n, std::size_t m,
                                double* out) const = 0;

    double evaluate_one(std::span<const double> row) const {
        double out = 0.0;
        evaluate_batch(row.data(), 1, row.size(), &out);
        return out;
    }
};

// (x_S, ref_{S-bar}): feature j from x when j is in S, from ref otherwise.
Instance concatenate(const Instance& x, const Instance& ref, Coalition s);

// Cache of black-box evaluations keyed by (instance id, coalition mask,
// reference index), plus a monotone counter of rows actually sent to
// evaluate_batch. Cache hits never touch the counter, which is what makes
// bandwidth sweeps free of extra model evaluations.
//
// Thread safety: internally synchronized. Concurrent callers asking for the
// same key block until the first evaluation lands, so the counter value
// depends only on the set of distinct keys requested, not on scheduling.
class EvalLedger {
public:
    std::uint64_t eval_count() const;

    // Stable id for a test instance; equal value vectors share an id.
    std::uint64_t instance_id(std::span<const double> x);

    // One output per reference row, cache first. Throws BlackBoxError with
    // the offending reference index on evaluation failure.
    void masked_eval(const BlackBox& bb, const Instance& x, const Dataset& refs,
                     Coalition s, std::span<double> out);
    std::vector<double> masked_eval(const BlackBox& bb, const Instance& x,
                                    const Dataset& refs, Coalition s);

    // Single (coalition, reference) cell, same cache.
    double masked_eval_single(const BlackBox& bb, const Instance& x, const Dataset& refs,
                              Coalition s, std::size_t ref_index);

    void clear();

private:
    struct Key {
        std::uint64_t instance;
        std::uint64_t mask;
        std::uint64_t ref;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const;
    };

    void eval_rows(const BlackBox& bb, const Instance& x, const Dataset& refs, Coalition s,
                   std::uint64_t id, const std::vector<std::size_t>& refs_to_eval);

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::unordered_map<Key, double, KeyHash> cache_;
    std::unordered_set<Key, KeyHash> in_flight_;
    std::map<std::vector<double>, std::uint64_t> ids_;
    std::uint64_t counter_ = 0;
};

}  // namespace nbrshap
