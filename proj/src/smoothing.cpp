#include "nbrshap/smoothing.hpp"

#include <cmath>

#include "nbrshap/parallel.hpp"
#include "nbrshap/simd.hpp"

namespace nbrshap {
namespace {

constexpr std::uint64_t kBootstrapStream = 0x424F4F54;
constexpr std::uint64_t kProbeStream = 0x50524F42;

}  // namespace

AttributionField::AttributionField(const std::vector<Instance>& points,
                                   std::vector<Attribution> attributions,
                                   std::vector<FeatureStat> ref_stats,
                                   std::vector<FeatureKind> kinds, double mean_ref_output)
    : attributions_(std::move(attributions)),
      ref_stats_(std::move(ref_stats)),
      mean_ref_output_(mean_ref_output) {
    if (points.empty()) throw SchemaError("attribution field: at least one point");
    check_same_width(points.size(), attributions_.size(), "attribution field");
    const std::size_t m = kinds.size();
    std::vector<double> flat;
    flat.reserve(points.size() * m);
    std::vector<std::string> names(m);
    for (std::size_t j = 0; j < m; ++j) names[j] = "p" + std::to_string(j);
    for (const auto& p : points) {
        check_same_width(p.size(), m, "attribution field point");
        flat.insert(flat.end(), p.values.begin(), p.values.end());
    }
    for (const auto& a : attributions_) {
        check_same_width(a.phi.size(), m, "attribution field phi");
    }
    points_ds_.emplace(std::move(names), std::move(kinds), std::move(flat));
}

bool AttributionField::has_variances() const {
    for (const auto& a : attributions_) {
        if (!a.variance) return false;
    }
    return true;
}

AttributionField build_attribution_field(const BlackBox& bb, EvalLedger& ledger,
                                         const Dataset& refs, std::vector<Instance> points,
                                         const EstimatorConfig& cfg,
                                         const FieldOptions& options) {
    const std::size_t n = points.size();
    std::vector<Attribution> attrs(n);
    const Rng base = Rng(cfg.seed).child(kBootstrapStream);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        EstimatorConfig point_cfg = cfg;
        point_cfg.seed = Rng::mix64(cfg.seed + 0x9E3779B97F4A7C15ULL * (i + 1));
        if (options.bootstrap_refs) {
            Rng gen = base.child(i);
            std::vector<double> rows;
            rows.reserve(*options.bootstrap_refs * refs.n_features());
            for (std::size_t b = 0; b < *options.bootstrap_refs; ++b) {
                const auto row = refs.row(gen.below(refs.n_rows()));
                rows.insert(rows.end(), row.begin(), row.end());
            }
            // Bootstrap draws bypass the shared ledger: rows repeat across
            // points, and cache hits would fake independent backgrounds.
            Dataset boot(refs.names(), refs.kinds(), std::move(rows));
            EvalLedger local;
            attrs[i] = explain(bb, local, points[i], boot, point_cfg);
        } else {
            attrs[i] = explain(bb, ledger, points[i], refs, point_cfg);
        }
    });

    // Base level for offset correction: mean output over the references.
    const auto outs = ledger.masked_eval(bb, refs.instance(0), refs, Coalition::empty());
    const double mean_f = simd::sum(outs.data(), outs.size()) / static_cast<double>(outs.size());
    return AttributionField(points, std::move(attrs),
                            refs.stats(), refs.kinds(), mean_f);
}

namespace {

WeightVector field_weights(const AttributionField& field, const Instance& x,
                           const KernelSpec& spec) {
    return kernel_weights(spec, x.values, field.points(), std::nullopt, &field.ref_stats());
}

}  // namespace

Attribution smooth(const AttributionField& field, const Instance& x, const KernelSpec& spec,
                   std::optional<double> f_of_x) {
    check_same_width(x.size(), field.n_features(), "smooth");
    const WeightVector w = field_weights(field, x, spec);
    const std::size_t m = field.n_features();
    const std::size_t n = field.size();

    Attribution out;
    out.phi.assign(m, 0.0);
    std::vector<double> phi_col(n);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i) phi_col[i] = field.attributions()[i].phi[j];
        out.phi[j] = simd::dot(w.normalised.data(), phi_col.data(), n);
    }
    for (std::size_t i = 0; i < n; ++i) phi_col[i] = field.attributions()[i].phi0;
    out.phi0 = simd::dot(w.normalised.data(), phi_col.data(), n);

    if (f_of_x) {
        const double residual = (*f_of_x - field.mean_ref_output()) - out.sum();
        const double shift = residual / static_cast<double>(m);
        for (double& p : out.phi) p += shift;
    }

    const auto& proto = field.attributions().front().meta;
    out.meta = proto;
    out.meta.estimator = "smoothed(" + proto.estimator + ")";
    out.meta.bandwidths = spec.sigmas;
    out.meta.eval_count = 0;
    out.meta.n_coalitions = n;
    return out;
}

std::vector<double> smooth_variance(const AttributionField& field, const Instance& x,
                                    const KernelSpec& spec) {
    if (!field.has_variances()) {
        throw VarianceUnavailable("smooth_variance: field lacks per-point variances");
    }
    const WeightVector w = field_weights(field, x, spec);
    const std::size_t m = field.n_features();
    const std::size_t n = field.size();
    std::vector<double> var(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double wi = w.normalised[i];
            acc = std::fma(wi * wi, (*field.attributions()[i].variance)[j], acc);
        }
        var[j] = acc;
    }
    return var;
}

double lipschitz_estimate(const AttributionField& field, const Instance& x,
                          const KernelSpec& spec, double delta, std::size_t probes,
                          const Rng& rng) {
    if (probes < 2) throw SchemaError("lipschitz_estimate: need at least two probes");
    const std::size_t m = field.n_features();
    check_same_width(x.size(), m, "lipschitz_estimate");
    const Attribution at_x = smooth(field, x, spec);

    Rng gen = rng.child(kProbeStream);
    double best = 0.0;
    for (std::size_t p = 0; p < probes; ++p) {
        // Uniform draw from the delta-ball around x.
        std::vector<double> dir(m);
        double norm2 = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            dir[j] = gen.normal();
            norm2 += dir[j] * dir[j];
        }
        const double norm = std::sqrt(norm2);
        if (!(norm > 0.0)) continue;
        const double radius =
            delta * std::pow(gen.uniform01(), 1.0 / static_cast<double>(m));
        Instance x0 = x;
        double dist2 = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double step = dir[j] / norm * radius;
            x0.values[j] += step;
            dist2 += step * step;
        }
        const double dist = std::sqrt(dist2);
        if (!(dist > 0.0)) continue;
        const Attribution at_x0 = smooth(field, x0, spec);
        double diff2 = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double d = at_x.phi[j] - at_x0.phi[j];
            diff2 += d * d;
        }
        best = std::max(best, std::sqrt(diff2) / dist);
    }
    return best;
}

}  // namespace nbrshap
