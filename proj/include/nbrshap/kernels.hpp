#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nbrshap/types.hpp"

namespace nbrshap {

// Exponential kernel on the standardized mixed distance
//   D^2 = sum_j delta_j^2,  delta_j = (a_j-b_j)/std_j  (continuous)
//                           delta_j = 1{a_j != b_j}    (categorical)
// with either one scalar bandwidth, raw = exp(-D^2/sigma^2), or a diagonal
// bandwidth vector, raw = exp(-sum_j delta_j^2/sigma_j^2). Scalar mode is
// the diagonal mode with every sigma_j equal, computed through the same
// per-feature scaling, so the two agree exactly.
//
// sigma_j = 0 is the exact-match limit: the feature contributes factor 1
// when delta_j = 0 and factor 0 otherwise. sigma_j = inf drops the feature
// from the distance.
struct KernelSpec {
    enum class SubsetMode { full_vector, dropped_only };

    std::vector<double> sigmas;  // size 1 = scalar bandwidth
    SubsetMode subset_mode = SubsetMode::full_vector;

    static KernelSpec scalar(double sigma, SubsetMode mode = SubsetMode::full_vector);
    static KernelSpec diagonal(std::vector<double> sigmas,
                               SubsetMode mode = SubsetMode::full_vector);

    bool is_scalar() const { return sigmas.size() == 1; }
    double sigma_for(std::size_t j) const { return is_scalar() ? sigmas[0] : sigmas[j]; }
};

struct WeightVector {
    std::vector<double> raw;
    std::vector<double> normalised;
    double ess = 0.0;  // (sum w)^2 / sum w^2
};

// Standardized mixed distance between two instances, optionally restricted
// to the features in `subset`.
double distance(const Instance& a, const Instance& b, const std::vector<FeatureStat>& stats,
                const std::vector<FeatureKind>& kinds,
                std::optional<Coalition> subset = std::nullopt);

// Squared scaled distances from x to every row: per feature j in subset,
// accumulate ((row_j-x_j)*scale_j)^2 for continuous and 1{!=}*wcat_j for
// categorical features. scale_j folds standardization and bandwidth.
std::vector<double> squared_scaled_distances(std::span<const double> x, const Dataset& rows,
                                             std::span<const double> scale_cont,
                                             std::span<const double> w_cat,
                                             std::optional<Coalition> subset);

// Kernel weights of every reference row relative to x. The kernel enters
// the estimators only through its self-normalised weights, so `raw` is
// scaled so the nearest reference carries weight one; this keeps bandwidth
// sweeps down to the sigma -> 0 end well defined (nearest-reference limit)
// instead of underflowing. `stats_override` substitutes the standardization
// statistics (used when weighting rows of one matrix in the scale of
// another dataset). Throws DegenerateNeighbourhood when every weight is
// exactly zero, which the sigma_j = 0 match rule can produce.
WeightVector kernel_weights(const KernelSpec& spec, std::span<const double> x,
                            const Dataset& refs,
                            std::optional<Coalition> subset = std::nullopt,
                            const std::vector<FeatureStat>* stats_override = nullptr);

struct BandwidthChoice {
    double sigma = 0.0;
    bool saturated = false;  // no grid value met the rule; largest returned
};

// Smallest grid sigma whose normalised weights give the ceil(0.25 L) nearest
// references at most 0.75 of the mass.
BandwidthChoice select_bandwidth(const Instance& x, const Dataset& refs,
                                 std::span<const double> grid);

// K geometrically spaced bandwidths covering (0, 3M]; the zero end of the
// range is replaced by sigma_min = 1e-3.
std::vector<double> sweep_grid(std::size_t m, std::size_t k);

}  // namespace nbrshap
