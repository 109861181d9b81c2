#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbrshap/errors.hpp"

namespace nbrshap {

enum class FeatureKind { continuous, categorical };

// A test point. Categorical features ride in the real-valued slot as
// integer codes; black boxes receive the raw code.
struct Instance {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t j) const { return values[j]; }
};

// Per-feature standardization statistics. Zero-variance continuous columns
// get std = 1 and a warning flag instead of an error.
struct FeatureStat {
    double mean = 0.0;
    double std = 1.0;
    bool zero_variance = false;
};

// A subset S of {0,...,M-1} as a fixed-width bitmask.
struct Coalition {
    std::uint64_t mask = 0;

    static Coalition empty() { return {0}; }
    static Coalition full(std::size_t m) {
        return {m >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << m) - 1)};
    }

    bool contains(std::size_t j) const { return (mask >> j) & 1; }
    std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask)); }
    Coalition with(std::size_t j) const { return {mask | (std::uint64_t{1} << j)}; }
    Coalition complement(std::size_t m) const { return {full(m).mask & ~mask}; }
    bool operator==(const Coalition&) const = default;
};

// Immutable background reference set with schema and standardization stats.
// Rows are stored both row-major (evaluation batches) and column-major
// (distance kernels stream one feature column across all references).
class Dataset {
public:
    Dataset(std::vector<std::string> names, std::vector<FeatureKind> kinds,
            std::vector<double> rows_row_major);

    static Dataset from_rows(std::vector<std::string> names,
                             std::vector<FeatureKind> kinds,
                             const std::vector<std::vector<double>>& rows);

    std::size_t n_features() const { return kinds_.size(); }
    std::size_t n_rows() const { return n_rows_; }

    double at(std::size_t row, std::size_t j) const {
        return row_major_[row * n_features() + j];
    }
    std::span<const double> row(std::size_t l) const {
        return {row_major_.data() + l * n_features(), n_features()};
    }
    std::span<const double> column(std::size_t j) const {
        return {col_major_.data() + j * n_rows_, n_rows_};
    }
    std::span<const double> rows_flat() const { return row_major_; }

    const std::string& name(std::size_t j) const { return names_[j]; }
    FeatureKind kind(std::size_t j) const { return kinds_[j]; }
    const std::vector<FeatureKind>& kinds() const { return kinds_; }
    const std::vector<std::string>& names() const { return names_; }

    const FeatureStat& stat(std::size_t j) const { return stats_[j]; }
    const std::vector<FeatureStat>& stats() const { return stats_; }
    bool has_zero_variance_features() const { return any_zero_variance_; }

    Instance instance(std::size_t l) const {
        auto r = row(l);
        return Instance{{r.begin(), r.end()}};
    }

private:
    std::vector<std::string> names_;
    std::vector<FeatureKind> kinds_;
    std::vector<double> row_major_;
    std::vector<double> col_major_;
    std::vector<FeatureStat> stats_;
    std::size_t n_rows_ = 0;
    bool any_zero_variance_ = false;
};

// Per-feature attributions plus estimator bookkeeping.
struct AttributionMeta {
    std::string estimator;
    std::uint64_t seed = 0;
    std::vector<double> bandwidths;  // empty for uniform weighting
    std::uint64_t eval_count = 0;    // black-box rows this run added
    std::size_t n_refs = 0;
    std::size_t n_coalitions = 0;
    bool pinv_fallback = false;
};

struct Attribution {
    std::vector<double> phi;
    double phi0 = 0.0;
    std::optional<std::vector<double>> variance;
    AttributionMeta meta;

    double sum() const {
        double s = 0.0;
        for (double v : phi) s += v;
        return s;
    }
};

void check_same_width(std::size_t a, std::size_t b, const char* what);

}  // namespace nbrshap
