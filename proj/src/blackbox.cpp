#include "nbrshap/blackbox.hpp"

#include <algorithm>

namespace nbrshap {

Instance concatenate(const Instance& x, const Instance& ref, Coalition s) {
    check_same_width(x.size(), ref.size(), "concatenate");
    Instance out = ref;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (s.contains(j)) out.values[j] = x.values[j];
    }
    return out;
}

std::size_t EvalLedger::KeyHash::operator()(const Key& k) const {
    std::uint64_t h = k.instance * 0x9E3779B97F4A7C15ULL;
    h ^= k.mask + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    h ^= k.ref + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
}

std::uint64_t EvalLedger::eval_count() const {
    std::lock_guard lock(mu_);
    return counter_;
}

std::uint64_t EvalLedger::instance_id(std::span<const double> x) {
    std::lock_guard lock(mu_);
    std::vector<double> key(x.begin(), x.end());
    auto [it, inserted] = ids_.try_emplace(std::move(key), ids_.size());
    return it->second;
}

void EvalLedger::eval_rows(const BlackBox& bb, const Instance& x, const Dataset& refs,
                           Coalition s, std::uint64_t id,
                           const std::vector<std::size_t>& refs_to_eval) {
    const std::size_t m = refs.n_features();
    std::vector<double> rows(refs_to_eval.size() * m);
    for (std::size_t i = 0; i < refs_to_eval.size(); ++i) {
        const auto ref_row = refs.row(refs_to_eval[i]);
        double* dst = rows.data() + i * m;
        std::copy(ref_row.begin(), ref_row.end(), dst);
        for (std::size_t j = 0; j < m; ++j) {
            if (s.contains(j)) dst[j] = x.values[j];
        }
    }
    std::vector<double> out(refs_to_eval.size());
    try {
        bb.evaluate_batch(rows.data(), refs_to_eval.size(), m, out.data());
    } catch (const BlackBoxError&) {
        std::lock_guard lock(mu_);
        for (std::size_t ref : refs_to_eval) in_flight_.erase(Key{id, s.mask, ref});
        cv_.notify_all();
        throw;
    } catch (const std::exception& e) {
        {
            std::lock_guard lock(mu_);
            for (std::size_t ref : refs_to_eval) in_flight_.erase(Key{id, s.mask, ref});
            cv_.notify_all();
        }
        throw BlackBoxError(e.what(), refs_to_eval.front());
    }
    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < refs_to_eval.size(); ++i) {
        cache_.emplace(Key{id, s.mask, refs_to_eval[i]}, out[i]);
        in_flight_.erase(Key{id, s.mask, refs_to_eval[i]});
    }
    counter_ += refs_to_eval.size();
    cv_.notify_all();
}

void EvalLedger::masked_eval(const BlackBox& bb, const Instance& x, const Dataset& refs,
                             Coalition s, std::span<double> out) {
    check_same_width(x.size(), refs.n_features(), "masked_eval");
    const std::size_t n = refs.n_rows();
    if (out.size() != n) throw SchemaError("masked_eval: output span size mismatch");
    const std::uint64_t id = instance_id(x.values);

    // Claim the missing rows; wait out rows another thread is evaluating.
    std::vector<std::size_t> mine;
    {
        std::unique_lock lock(mu_);
        for (;;) {
            mine.clear();
            bool blocked = false;
            for (std::size_t l = 0; l < n; ++l) {
                const Key key{id, s.mask, l};
                if (cache_.contains(key)) continue;
                if (in_flight_.contains(key)) {
                    blocked = true;
                } else {
                    mine.push_back(l);
                }
            }
            if (!mine.empty() || !blocked) break;
            cv_.wait(lock);
        }
        for (std::size_t l : mine) in_flight_.insert(Key{id, s.mask, l});
    }
    if (!mine.empty()) eval_rows(bb, x, refs, s, id, mine);

    std::unique_lock lock(mu_);
    for (std::size_t l = 0; l < n; ++l) {
        const Key key{id, s.mask, l};
        cv_.wait(lock, [&] { return !in_flight_.contains(key); });
        auto it = cache_.find(key);
        if (it == cache_.end())
            throw BlackBoxError("evaluation aborted by concurrent failure", l);
        out[l] = it->second;
    }
}

std::vector<double> EvalLedger::masked_eval(const BlackBox& bb, const Instance& x,
                                            const Dataset& refs, Coalition s) {
    std::vector<double> out(refs.n_rows());
    masked_eval(bb, x, refs, s, out);
    return out;
}

double EvalLedger::masked_eval_single(const BlackBox& bb, const Instance& x,
                                      const Dataset& refs, Coalition s,
                                      std::size_t ref_index) {
    check_same_width(x.size(), refs.n_features(), "masked_eval");
    const std::uint64_t id = instance_id(x.values);
    const Key key{id, s.mask, ref_index};
    {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return !in_flight_.contains(key); });
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        in_flight_.insert(key);
    }
    eval_rows(bb, x, refs, s, id, {ref_index});
    std::lock_guard lock(mu_);
    return cache_.at(key);
}

void EvalLedger::clear() {
    std::lock_guard lock(mu_);
    cache_.clear();
    ids_.clear();
    counter_ = 0;
}

}  // namespace nbrshap
