#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nbrshap/estimators.hpp"

namespace nbrshap {

// Row-major matrix with its width, for generated evaluation points.
struct Matrix {
    std::vector<double> data;
    std::size_t cols = 0;

    std::size_t rows() const { return cols == 0 ? 0 : data.size() / cols; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

struct AuditReport {
    Matrix concatenated;
    std::vector<double> ood_scores_real;
    std::vector<double> ood_scores_concat;
    double auc = 0.5;
    double mean_manifold_distance = 0.0;  // mean kNN score of the concatenations
    std::size_t n = 0;
    std::size_t k = 0;
    std::uint64_t seed = 0;
};

// n synthetic evaluation rows (x_S, x*_Dbar): coalition sizes uniform on
// {0..M-1} (the Shapley distribution's equal mass per size), subsets uniform
// within a size, references drawn with probability proportional to the
// weighting's reference weights. Several instances are sampled uniformly.
Matrix generate_concatenations(std::span<const Instance> instances, const Dataset& refs,
                               const Weighting& weighting, std::size_t n, const Rng& rng);

// Distance to the k-th nearest background row (standardized mixed metric);
// higher means further off the manifold.
std::vector<double> ood_knn_score(const Dataset& background, const Matrix& points,
                                  std::size_t k);

// Mann-Whitney AUC of scores separating positives from negatives; 0.5 when
// the two samples are identical point sets.
double rank_auc(std::span<const double> negatives, std::span<const double> positives);

// Splits the references into a scoring background and a held-out real half,
// generates concatenations against the background and reports how separable
// they are from the held-out rows.
AuditReport audit(std::span<const Instance> instances, const Dataset& refs,
                  const Weighting& weighting, std::size_t n, std::size_t k,
                  std::uint64_t seed, std::size_t threads = 1);

}  // namespace nbrshap
