#include "nbrshap/types.hpp"

#include <cmath>

#include "nbrshap/simd.hpp"

namespace nbrshap {

void check_same_width(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw SchemaError(std::string(what) + ": feature count mismatch (" +
                          std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

Dataset::Dataset(std::vector<std::string> names, std::vector<FeatureKind> kinds,
                 std::vector<double> rows_row_major)
    : names_(std::move(names)), kinds_(std::move(kinds)), row_major_(std::move(rows_row_major)) {
    const std::size_t m = kinds_.size();
    if (names_.size() != m) throw SchemaError("dataset: names/kinds length mismatch");
    if (m == 0) throw SchemaError("dataset: no features");
    if (row_major_.size() % m != 0) throw SchemaError("dataset: ragged row data");
    n_rows_ = row_major_.size() / m;
    if (n_rows_ == 0) throw SchemaError("dataset: at least one reference row required");
    for (double v : row_major_) {
        if (!std::isfinite(v)) throw SchemaError("dataset: non-finite value");
    }

    col_major_.resize(row_major_.size());
    for (std::size_t l = 0; l < n_rows_; ++l) {
        for (std::size_t j = 0; j < m; ++j) {
            col_major_[j * n_rows_ + l] = row_major_[l * m + j];
        }
    }

    // Population mean/std, as a standard scaler computes them.
    stats_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto col = column(j);
        const double mean = simd::sum(col.data(), col.size()) / static_cast<double>(n_rows_);
        const double ss = simd::sum_sq_dev(col.data(), col.size(), mean);
        double sd = std::sqrt(ss / static_cast<double>(n_rows_));
        bool zero = false;
        if (!(sd > 0.0)) {
            sd = 1.0;
            zero = kinds_[j] == FeatureKind::continuous;
        }
        stats_[j] = {mean, kinds_[j] == FeatureKind::continuous ? sd : 1.0, zero};
        any_zero_variance_ = any_zero_variance_ || zero;
    }
}

Dataset Dataset::from_rows(std::vector<std::string> names, std::vector<FeatureKind> kinds,
                           const std::vector<std::vector<double>>& rows) {
    const std::size_t m = kinds.size();
    std::vector<double> flat;
    flat.reserve(rows.size() * m);
    for (const auto& r : rows) {
        check_same_width(r.size(), m, "dataset row");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return Dataset(std::move(names), std::move(kinds), std::move(flat));
}

}  // namespace nbrshap
