#pragma once

#include <optional>
#include <vector>

#include "nbrshap/estimators.hpp"

namespace nbrshap {

// Attributions computed at a set of field points under one shared estimator
// config, seed policy and reference dataset. Smoothed SHAP averages these
// with a kernel centred at the query instance.
//
// Standardization statistics are copied from the reference dataset so
// smoothing bandwidths live on the same scale as neighbourhood bandwidths.
class AttributionField {
public:
    AttributionField(const std::vector<Instance>& points, std::vector<Attribution> attributions,
                     std::vector<FeatureStat> ref_stats, std::vector<FeatureKind> kinds,
                     double mean_ref_output);

    std::size_t size() const { return points_ds_->n_rows(); }
    std::size_t n_features() const { return points_ds_->n_features(); }
    const Dataset& points() const { return *points_ds_; }
    const std::vector<Attribution>& attributions() const { return attributions_; }
    const std::vector<FeatureStat>& ref_stats() const { return ref_stats_; }
    bool has_variances() const;

    // Mean black-box output over the reference dataset; the base level of
    // the standard efficiency sum f(x) - E[f].
    double mean_ref_output() const { return mean_ref_output_; }

private:
    std::optional<Dataset> points_ds_;
    std::vector<Attribution> attributions_;
    std::vector<FeatureStat> ref_stats_;
    double mean_ref_output_;
};

struct FieldOptions {
    // Bootstrap this many rows (with replacement, seed-split per point) from
    // the reference dataset for each field point instead of sharing the full
    // set. Realizes the i.i.d.-background assumption behind the smoothing
    // bias/variance analysis.
    std::optional<std::size_t> bootstrap_refs;
};

AttributionField build_attribution_field(const BlackBox& bb, EvalLedger& ledger,
                                         const Dataset& refs,
                                         std::vector<Instance> points,
                                         const EstimatorConfig& cfg,
                                         const FieldOptions& options = {});

// Kernel-weighted average of the field attributions at x. When f_of_x is
// supplied the offset correction distributes the efficiency residual
//   f(x) - mean_ref_output - sum_j phi_j
// uniformly over the features, restoring the standard efficiency sum.
Attribution smooth(const AttributionField& field, const Instance& x, const KernelSpec& spec,
                   std::optional<double> f_of_x = std::nullopt);

// Var[phi_smtd_j] = sum_i w_i^2 Var[phi_j(x'_i)] / (sum_i w_i)^2.
std::vector<double> smooth_variance(const AttributionField& field, const Instance& x,
                                    const KernelSpec& spec);

// Empirical local Lipschitz diagnostic of the smoothed field:
//   max over probes x0 in the delta-ball of |phi(x)-phi(x0)| / |x-x0|.
double lipschitz_estimate(const AttributionField& field, const Instance& x,
                          const KernelSpec& spec, double delta, std::size_t probes,
                          const Rng& rng);

}  // namespace nbrshap
