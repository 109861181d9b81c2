#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nbrshap/blackbox.hpp"
#include "nbrshap/coalitions.hpp"
#include "nbrshap/kernels.hpp"
#include "nbrshap/rng.hpp"
#include "nbrshap/types.hpp"

namespace nbrshap {

enum class EstimatorMode { exact, formula_mc, kernel_shap };
enum class WeightingKind { uniform, neighbourhood, anti_neighbourhood };

// How the reference population is weighted inside the value function.
// Uniform reproduces marginal SHAP; neighbourhood weights references by an
// exponential kernel around x (self-normalised importance sampling); anti
// weights by 1 - d/mean(d), the linearity complement of the neighbourhood.
struct Weighting {
    WeightingKind kind = WeightingKind::uniform;
    std::optional<KernelSpec> kernel;

    static Weighting uniform() { return {}; }
    static Weighting neighbourhood(KernelSpec spec) {
        return {WeightingKind::neighbourhood, std::move(spec)};
    }
    static Weighting anti(KernelSpec spec) {
        return {WeightingKind::anti_neighbourhood, std::move(spec)};
    }
};

struct EstimatorConfig {
    EstimatorMode mode = EstimatorMode::exact;
    Weighting weighting;
    std::size_t n_coalitions = 0;  // C, used by formula_mc and kernel_shap
    std::uint64_t seed = 0;
    bool compute_variance = false;
    std::size_t threads = 1;
};

// Reference weights for one coalition. Uniform and neighbourhood weights
// are a convex combination (sum 1); anti weights are signed and sum to 0.
struct ReferenceWeights {
    std::vector<double> w;
    double ess = 0.0;
};

ReferenceWeights reference_weights(const Weighting& weighting, const Instance& x,
                                   const Dataset& refs,
                                   std::optional<Coalition> s = std::nullopt);

// v(S) = sum_l w_l f(x_S, x*_l,Dbar): the Nadaraya-Watson estimate of the
// neighbourhood value function, and the plain mean under uniform weights.
double value_function(const BlackBox& bb, EvalLedger& ledger, const Instance& x,
                      const Dataset& refs, Coalition s, const ReferenceWeights& w);

Attribution explain_exact(const BlackBox& bb, EvalLedger& ledger, const Instance& x,
                          const Dataset& refs, const EstimatorConfig& cfg);
Attribution explain_kernelshap(const BlackBox& bb, EvalLedger& ledger, const Instance& x,
                               const Dataset& refs, const EstimatorConfig& cfg);
Attribution explain_formula_mc(const BlackBox& bb, EvalLedger& ledger, const Instance& x,
                               const Dataset& refs, const EstimatorConfig& cfg);

// Dispatch on cfg.mode.
Attribution explain(const BlackBox& bb, EvalLedger& ledger, const Instance& x,
                    const Dataset& refs, const EstimatorConfig& cfg);

// Enumerated-mode variance of the Shapley formula estimator:
//   Var[phi_j] = (1/M^2) sum_{S sub {1..M}\j} (varmean(S u j) + varmean(S))
//                                             / binom(M-1,|S|)^2
// where varmean(S) is the variance of the (weighted) mean of the masked
// outputs: sum_l w_l^2 (f_l - fbar_w)^2, the self-normalised IS estimator,
// which reduces to popvar/L under uniform weights.
//
// outputs_by_mask must hold 2^M vectors of L outputs, indexed by mask.
std::vector<double> variance_formula(const std::vector<std::vector<double>>& outputs_by_mask,
                                     const Weighting& weighting, const Instance& x,
                                     const Dataset& refs);

enum class Normalisation { none, by_std, by_abs_sum };

// Scale phi (and variance quadratically) so features are comparable across
// estimators operating on different scales.
void normalise_attribution(Attribution& attr, Normalisation mode);

const char* weighting_name(WeightingKind kind);
const char* mode_name(EstimatorMode mode);

}  // namespace nbrshap
