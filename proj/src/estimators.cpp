#include "nbrshap/estimators.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "nbrshap/parallel.hpp"
#include "nbrshap/simd.hpp"

namespace nbrshap {
namespace {

constexpr std::uint64_t kCoalitionStream = 0x434F414C;  // coalition sampling
constexpr std::uint64_t kFormulaStream = 0x464D4331;    // formula-MC draws

std::optional<Coalition> weight_subset(const KernelSpec& spec, Coalition s, std::size_t m) {
    if (spec.subset_mode == KernelSpec::SubsetMode::dropped_only) {
        return s.complement(m);
    }
    return std::nullopt;
}

// Variance of the weighted mean of one coalition's masked outputs.
double varmean(const ReferenceWeights& w, std::span<const double> outs) {
    const double mean = simd::dot(w.w.data(), outs.data(), outs.size());
    return simd::dot_sq_dev(w.w.data(), outs.data(), outs.size(), mean);
}

std::vector<double> weighting_bandwidths(const Weighting& weighting) {
    if (weighting.kernel) return weighting.kernel->sigmas;
    return {};
}

std::string estimator_id(EstimatorMode mode, const Weighting& weighting) {
    return std::string(mode_name(mode)) + "+" + weighting_name(weighting.kind);
}

// Weights shared by every coalition under full-vector mode; per-coalition
// weights under dropped-only mode are requested on demand.
struct WeightPlan {
    const Weighting& weighting;
    const Instance& x;
    const Dataset& refs;
    std::optional<ReferenceWeights> shared;

    WeightPlan(const Weighting& weighting, const Instance& x, const Dataset& refs)
        : weighting(weighting), x(x), refs(refs) {
        const bool per_coalition =
            weighting.kind != WeightingKind::uniform &&
            weighting.kernel->subset_mode == KernelSpec::SubsetMode::dropped_only;
        if (!per_coalition) shared = reference_weights(weighting, x, refs);
    }

    ReferenceWeights for_coalition(Coalition s) const {
        if (shared) return *shared;
        return reference_weights(weighting, x, refs, s);
    }
};

}  // namespace

const char* weighting_name(WeightingKind kind) {
    switch (kind) {
        case WeightingKind::uniform: return "uniform";
        case WeightingKind::neighbourhood: return "neighbourhood";
        case WeightingKind::anti_neighbourhood: return "anti";
    }
    return "uniform";
}

const char* mode_name(EstimatorMode mode) {
    switch (mode) {
        case EstimatorMode::exact: return "exact";
        case EstimatorMode::formula_mc: return "formula_mc";
        case EstimatorMode::kernel_shap: return "kernelshap";
    }
    return "exact";
}

ReferenceWeights reference_weights(const Weighting& weighting, const Instance& x,
                                   const Dataset& refs, std::optional<Coalition> s) {
    const std::size_t n = refs.n_rows();
    if (weighting.kind == WeightingKind::uniform) {
        return {std::vector<double>(n, 1.0 / static_cast<double>(n)),
                static_cast<double>(n)};
    }
    if (!weighting.kernel) throw SchemaError("weighting: kernel spec required");
    const auto subset =
        s ? weight_subset(*weighting.kernel, *s, refs.n_features()) : std::nullopt;
    WeightVector kw = kernel_weights(*weighting.kernel, x.values, refs, subset);
    if (weighting.kind == WeightingKind::neighbourhood) {
        return {std::move(kw.normalised), kw.ess};
    }
    // Anti-neighbourhood: w_l = (1 - d_l/mean(d)) / L; signed, sums to zero.
    const double mean_d =
        simd::sum(kw.raw.data(), n) / static_cast<double>(n);
    std::vector<double> w(n);
    const double inv_l = 1.0 / static_cast<double>(n);
    for (std::size_t l = 0; l < n; ++l) {
        w[l] = (1.0 - kw.raw[l] / mean_d) * inv_l;
    }
    return {std::move(w), 0.0};
}

double value_function(const BlackBox& bb, EvalLedger& ledger, const Instance& x,
                      const Dataset& refs, Coalition s, const ReferenceWeights& w) {
    check_same_width(w.w.size(), refs.n_rows(), "value_function weights");
    const auto outs = ledger.masked_eval(bb, x, refs, s);
    return simd::dot(w.w.data(), outs.data(), outs.size());
}

Attribution explain_exact(const BlackBox& bb, EvalLedger& ledger, const Instance& x,
                          const Dataset& refs, const EstimatorConfig& cfg) {
    const std::size_t m = x.size();
    check_same_width(m, refs.n_features(), "explain");
    const auto coalitions = enumerate_coalitions(m);  // throws beyond the guard
    const std::size_t n_masks = coalitions.size();
    const bool want_var = cfg.compute_variance;
    if (want_var && cfg.weighting.kind == WeightingKind::anti_neighbourhood) {
        throw VarianceUnavailable("variance estimator not defined for anti weighting");
    }
    if (want_var && refs.n_rows() < 2) {
        throw VarianceUnavailable("variance requires at least two references");
    }

    const std::uint64_t count_before = ledger.eval_count();
    const WeightPlan plan(cfg.weighting, x, refs);

    std::vector<double> v(n_masks);
    std::vector<double> vm(want_var ? n_masks : 0);
    parallel_for(n_masks, cfg.threads, [&](std::size_t i) {
        const Coalition s = coalitions[i];
        const auto outs = ledger.masked_eval(bb, x, refs, s);
        const ReferenceWeights w = plan.for_coalition(s);
        v[s.mask] = simd::dot(w.w.data(), outs.data(), outs.size());
        if (want_var) vm[s.mask] = varmean(w, outs);
    });

    Attribution attr;
    attr.phi.assign(m, 0.0);
    if (want_var) attr.variance.emplace(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const std::uint64_t bit = std::uint64_t{1} << j;
        for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const double w = shapley_subset_weight(m, Coalition{mask}.size());
            attr.phi[j] += w * (v[mask | bit] - v[mask]);
            if (want_var) (*attr.variance)[j] += w * w * (vm[mask | bit] + vm[mask]);
        }
    }
    attr.phi0 = v[0];
    attr.meta = {estimator_id(EstimatorMode::exact, cfg.weighting),
                 cfg.seed,
                 weighting_bandwidths(cfg.weighting),
                 ledger.eval_count() - count_before,
                 refs.n_rows(),
                 n_masks,
                 false};
    return attr;
}

Attribution explain_kernelshap(const BlackBox& bb, EvalLedger& ledger, const Instance& x,
                               const Dataset& refs, const EstimatorConfig& cfg) {
    const std::size_t m = x.size();
    check_same_width(m, refs.n_features(), "explain");
    if (cfg.n_coalitions < 2) throw SchemaError("kernelshap: C must be >= 2");
    const bool want_var = cfg.compute_variance;
    if (want_var && cfg.weighting.kind == WeightingKind::anti_neighbourhood) {
        throw VarianceUnavailable("variance estimator not defined for anti weighting");
    }

    const std::uint64_t count_before = ledger.eval_count();
    const WeightPlan plan(cfg.weighting, x, refs);

    auto value_of = [&](Coalition s, double* vm_out) {
        const auto outs = ledger.masked_eval(bb, x, refs, s);
        const ReferenceWeights w = plan.for_coalition(s);
        if (vm_out) *vm_out = varmean(w, outs);
        return simd::dot(w.w.data(), outs.data(), outs.size());
    };

    // Anchors are always evaluated exactly; they pin phi0 and efficiency.
    double vm_empty = 0.0, vm_full = 0.0;
    const double v_empty = value_of(Coalition::empty(), want_var ? &vm_empty : nullptr);
    const double v_full = value_of(Coalition::full(m), want_var ? &vm_full : nullptr);

    Attribution attr;
    attr.phi.assign(m, 0.0);
    attr.phi0 = v_empty;

    if (m == 1) {
        // No proper subsets; the anchors determine the single attribution.
        attr.phi[0] = v_full - v_empty;
        if (want_var) attr.variance = std::vector<double>{vm_full + vm_empty};
        attr.meta = {estimator_id(EstimatorMode::kernel_shap, cfg.weighting),
                     cfg.seed,
                     weighting_bandwidths(cfg.weighting),
                     ledger.eval_count() - count_before,
                     refs.n_rows(),
                     0,
                     false};
        return attr;
    }

    const CoalitionSample sample =
        sample_coalitions(m, cfg.n_coalitions, Rng(cfg.seed).child(kCoalitionStream));
    if (want_var && !sample.exhaustive) {
        throw VarianceUnavailable(
            "variance formula needs complete coalition enumeration (raise C)");
    }

    const std::size_t n_rows = sample.coalitions.size();
    std::vector<double> y(n_rows);
    std::vector<double> vm(want_var ? n_rows : 0);
    parallel_for(n_rows, cfg.threads, [&](std::size_t i) {
        y[i] = value_of(sample.coalitions[i], want_var ? &vm[i] : nullptr);
    });

    // Anchor constraints eliminated analytically: with the last feature's
    // column removed, regress y - v0 - z_last (vf - v0) on z_j - z_last.
    const std::size_t k = m - 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    const double span = v_full - v_empty;
    std::vector<double> g(k);
    for (std::size_t i = 0; i < n_rows; ++i) {
        const Coalition s = sample.coalitions[i];
        const double z_last = s.contains(m - 1) ? 1.0 : 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            g[j] = (s.contains(j) ? 1.0 : 0.0) - z_last;
        }
        const double t = y[i] - v_empty - z_last * span;
        const double w = sample.reg_weight[i];
        for (std::size_t p = 0; p < k; ++p) {
            if (g[p] == 0.0) continue;
            rhs(p) += w * g[p] * t;
            for (std::size_t q = 0; q <= p; ++q) {
                a(p, q) += w * g[p] * g[q];
            }
        }
    }
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = p + 1; q < k; ++q) a(p, q) = a(q, p);
    }

    Eigen::VectorXd phi_head;
    bool pinv = false;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
        phi_head = llt.solve(rhs);
    } else {
        // Singular normal equations (tiny C or degenerate coalitions).
        pinv = true;
        phi_head = a.completeOrthogonalDecomposition().solve(rhs);
    }

    double head_sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        attr.phi[j] = phi_head(static_cast<Eigen::Index>(j));
        head_sum += attr.phi[j];
    }
    attr.phi[m - 1] = span - head_sum;

    if (want_var) {
        // Exhaustive sample: apply the enumerated variance formula.
        std::vector<double> vm_by_mask(std::size_t{1} << m, 0.0);
        vm_by_mask[0] = vm_empty;
        vm_by_mask[Coalition::full(m).mask] = vm_full;
        for (std::size_t i = 0; i < n_rows; ++i) {
            vm_by_mask[sample.coalitions[i].mask] = vm[i];
        }
        attr.variance.emplace(m, 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            const std::uint64_t bit = std::uint64_t{1} << j;
            for (std::uint64_t mask = 0; mask < vm_by_mask.size(); ++mask) {
                if (mask & bit) continue;
                const double w = shapley_subset_weight(m, Coalition{mask}.size());
                (*attr.variance)[j] += w * w * (vm_by_mask[mask | bit] + vm_by_mask[mask]);
            }
        }
    }

    attr.meta = {estimator_id(EstimatorMode::kernel_shap, cfg.weighting),
                 cfg.seed,
                 weighting_bandwidths(cfg.weighting),
                 ledger.eval_count() - count_before,
                 refs.n_rows(),
                 n_rows,
                 pinv};
    return attr;
}

Attribution explain_formula_mc(const BlackBox& bb, EvalLedger& ledger, const Instance& x,
                               const Dataset& refs, const EstimatorConfig& cfg) {
    const std::size_t m = x.size();
    check_same_width(m, refs.n_features(), "explain");
    if (cfg.n_coalitions == 0) throw SchemaError("formula_mc: C must be positive");
    if (cfg.compute_variance) {
        throw VarianceUnavailable("variance formula needs enumerated coalitions");
    }

    const std::uint64_t count_before = ledger.eval_count();
    const WeightPlan plan(cfg.weighting, x, refs);
    auto value_of = [&](Coalition s) {
        const auto outs = ledger.masked_eval(bb, x, refs, s);
        const ReferenceWeights w = plan.for_coalition(s);
        return simd::dot(w.w.data(), outs.data(), outs.size());
    };

    Attribution attr;
    attr.phi.assign(m, 0.0);
    const Rng base = Rng(cfg.seed).child(kFormulaStream);
    parallel_for(m, cfg.threads, [&](std::size_t j) {
        Rng gen = base.child(j);
        double acc = 0.0;
        for (std::size_t c = 0; c < cfg.n_coalitions; ++c) {
            // Shapley coalition distribution restricted to subsets without j:
            // size uniform on {0..M-1}, subset uniform within the size class.
            const auto size = static_cast<std::uint32_t>(gen.below(m));
            std::uint64_t mask = 0;
            for (std::uint32_t p : gen.subset(static_cast<std::uint32_t>(m - 1), size)) {
                const std::uint32_t feat = p < j ? p : p + 1;
                mask |= std::uint64_t{1} << feat;
            }
            const Coalition s{mask};
            acc += value_of(s.with(j)) - value_of(s);
        }
        attr.phi[j] = acc / static_cast<double>(cfg.n_coalitions);
    });
    attr.phi0 = value_of(Coalition::empty());
    attr.meta = {estimator_id(EstimatorMode::formula_mc, cfg.weighting),
                 cfg.seed,
                 weighting_bandwidths(cfg.weighting),
                 ledger.eval_count() - count_before,
                 refs.n_rows(),
                 cfg.n_coalitions,
                 false};
    return attr;
}

Attribution explain(const BlackBox& bb, EvalLedger& ledger, const Instance& x,
                    const Dataset& refs, const EstimatorConfig& cfg) {
    switch (cfg.mode) {
        case EstimatorMode::exact: return explain_exact(bb, ledger, x, refs, cfg);
        case EstimatorMode::formula_mc: return explain_formula_mc(bb, ledger, x, refs, cfg);
        case EstimatorMode::kernel_shap: return explain_kernelshap(bb, ledger, x, refs, cfg);
    }
    throw SchemaError("explain: unknown estimator mode");
}

std::vector<double> variance_formula(const std::vector<std::vector<double>>& outputs_by_mask,
                                     const Weighting& weighting, const Instance& x,
                                     const Dataset& refs) {
    const std::size_t m = x.size();
    if (outputs_by_mask.size() != (std::size_t{1} << m)) {
        throw SchemaError("variance_formula: need outputs for all 2^M coalitions");
    }
    if (refs.n_rows() < 2) {
        throw VarianceUnavailable("variance requires at least two references");
    }
    if (weighting.kind == WeightingKind::anti_neighbourhood) {
        throw VarianceUnavailable("variance estimator not defined for anti weighting");
    }
    const WeightPlan plan(weighting, x, refs);
    std::vector<double> vm(outputs_by_mask.size());
    for (std::uint64_t mask = 0; mask < outputs_by_mask.size(); ++mask) {
        const auto& outs = outputs_by_mask[mask];
        check_same_width(outs.size(), refs.n_rows(), "variance_formula outputs");
        vm[mask] = varmean(plan.for_coalition(Coalition{mask}), outs);
    }
    std::vector<double> var(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const std::uint64_t bit = std::uint64_t{1} << j;
        for (std::uint64_t mask = 0; mask < vm.size(); ++mask) {
            if (mask & bit) continue;
            const double w = shapley_subset_weight(m, Coalition{mask}.size());
            var[j] += w * w * (vm[mask | bit] + vm[mask]);
        }
    }
    return var;
}

void normalise_attribution(Attribution& attr, Normalisation mode) {
    if (mode == Normalisation::none || attr.phi.empty()) return;
    double scale = 0.0;
    if (mode == Normalisation::by_std) {
        const double mean = attr.sum() / static_cast<double>(attr.phi.size());
        double ss = 0.0;
        for (double p : attr.phi) ss += (p - mean) * (p - mean);
        scale = std::sqrt(ss / static_cast<double>(attr.phi.size()));
    } else {
        for (double p : attr.phi) scale += std::abs(p);
    }
    if (!(scale > 0.0)) return;  // constant attributions stay as they are
    for (double& p : attr.phi) p /= scale;
    if (attr.variance) {
        for (double& v : *attr.variance) v /= scale * scale;
    }
}

}  // namespace nbrshap
