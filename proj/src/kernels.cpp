#include "nbrshap/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nbrshap/simd.hpp"

namespace nbrshap {

KernelSpec KernelSpec::scalar(double sigma, SubsetMode mode) {
    if (!(sigma > 0.0)) throw SchemaError("kernel: scalar sigma must be > 0");
    return {{sigma}, mode};
}

KernelSpec KernelSpec::diagonal(std::vector<double> sigmas, SubsetMode mode) {
    if (sigmas.empty()) throw SchemaError("kernel: empty bandwidth vector");
    for (double s : sigmas) {
        if (std::isnan(s) || s < 0.0) throw SchemaError("kernel: sigma_j must be >= 0");
    }
    return {std::move(sigmas), mode};
}

double distance(const Instance& a, const Instance& b, const std::vector<FeatureStat>& stats,
                const std::vector<FeatureKind>& kinds, std::optional<Coalition> subset) {
    check_same_width(a.size(), b.size(), "distance");
    check_same_width(a.size(), stats.size(), "distance stats");
    double d2 = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (subset && !subset->contains(j)) continue;
        if (kinds[j] == FeatureKind::categorical) {
            d2 += (a[j] != b[j]) ? 1.0 : 0.0;
        } else {
            const double t = (a[j] - b[j]) / stats[j].std;
            d2 = std::fma(t, t, d2);
        }
    }
    return std::sqrt(d2);
}

std::vector<double> squared_scaled_distances(std::span<const double> x, const Dataset& rows,
                                             std::span<const double> scale_cont,
                                             std::span<const double> w_cat,
                                             std::optional<Coalition> subset) {
    const std::size_t m = rows.n_features();
    const std::size_t n = rows.n_rows();
    check_same_width(x.size(), m, "distance");
    std::vector<double> acc(n, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        if (subset && !subset->contains(j)) continue;
        const auto col = rows.column(j);
        if (rows.kind(j) == FeatureKind::categorical) {
            simd::sq_dist_cat_acc(acc.data(), col.data(), n, x[j], w_cat[j]);
        } else {
            simd::sq_dist_cont_acc(acc.data(), col.data(), n, x[j], scale_cont[j]);
        }
    }
    return acc;
}

namespace {

WeightVector finish_weights(std::vector<double> raw, double min_dist, double sigma_hint) {
    const std::size_t n = raw.size();
    const double total = simd::sum(raw.data(), n);
    if (!(total > 0.0)) {
        throw DegenerateNeighbourhood(min_dist, sigma_hint);
    }
    WeightVector out;
    out.normalised.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.normalised[i] = raw[i] / total;
    const double sq = simd::dot(raw.data(), raw.data(), n);
    out.ess = (total * total) / sq;
    out.raw = std::move(raw);
    return out;
}

}  // namespace

WeightVector kernel_weights(const KernelSpec& spec, std::span<const double> x,
                            const Dataset& refs, std::optional<Coalition> subset,
                            const std::vector<FeatureStat>* stats_override) {
    const std::size_t m = refs.n_features();
    const std::size_t n = refs.n_rows();
    check_same_width(x.size(), m, "kernel_weights");
    if (!spec.is_scalar()) check_same_width(spec.sigmas.size(), m, "kernel bandwidths");
    const auto& stats = stats_override ? *stats_override : refs.stats();
    check_same_width(stats.size(), m, "kernel stats");

    // Fold standardization and bandwidth into one per-feature scale.
    // sigma_j = 0 features are handled by an exact-match pass below.
    std::vector<double> scale(m, 0.0), wcat(m, 0.0);
    Coalition active = subset.value_or(Coalition::full(m));
    bool any_zero_sigma = false;
    for (std::size_t j = 0; j < m; ++j) {
        if (!active.contains(j)) continue;
        const double sj = spec.sigma_for(j);
        if (sj == 0.0) {
            any_zero_sigma = true;
            active.mask &= ~(std::uint64_t{1} << j);
            continue;
        }
        scale[j] = 1.0 / (stats[j].std * sj);
        const double inv = 1.0 / sj;
        wcat[j] = inv * inv;
    }

    auto acc = squared_scaled_distances(x, refs, scale, wcat, active);
    // Shift by the smallest squared distance before exponentiating. The
    // kernel is only defined up to its normalising constant, so the
    // self-normalised weights are unchanged, and tiny bandwidths resolve to
    // the nearest-reference limit instead of underflowing the whole vector.
    double min_acc = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) min_acc = std::min(min_acc, acc[i]);
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = std::exp(min_acc - acc[i]);
    const double min_dist =
        spec.is_scalar() ? std::sqrt(min_acc) * spec.sigmas[0] : std::sqrt(min_acc);
    if (any_zero_sigma) {
        for (std::size_t j = 0; j < m; ++j) {
            if (!subset.value_or(Coalition::full(m)).contains(j)) continue;
            if (spec.sigma_for(j) != 0.0) continue;
            const auto col = refs.column(j);
            for (std::size_t i = 0; i < n; ++i) {
                if (col[i] != x[j]) raw[i] = 0.0;
            }
        }
    }
    return finish_weights(std::move(raw), min_dist, spec.sigmas[0]);
}

BandwidthChoice select_bandwidth(const Instance& x, const Dataset& refs,
                                 std::span<const double> grid) {
    if (grid.empty()) throw SchemaError("select_bandwidth: empty grid");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i] < grid[i + 1])) {
            throw SchemaError("select_bandwidth: grid must be strictly ascending");
        }
    }
    const std::size_t n = refs.n_rows();

    // Unscaled standardized distances; the nearest-quartile set is shared by
    // every candidate sigma.
    std::vector<double> scale(refs.n_features()), wcat(refs.n_features(), 1.0);
    for (std::size_t j = 0; j < refs.n_features(); ++j) scale[j] = 1.0 / refs.stat(j).std;
    const auto d2 = squared_scaled_distances(x.values, refs, scale, wcat, std::nullopt);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d2[a] < d2[b]; });
    const std::size_t q = (n + 3) / 4;  // ceil(0.25 L)

    for (double sigma : grid) {
        const double inv = 1.0 / (sigma * sigma);
        double total = 0.0, near = 0.0;
        for (std::size_t rank = 0; rank < n; ++rank) {
            const double w = std::exp(-d2[order[rank]] * inv);
            total += w;
            if (rank < q) near += w;
        }
        // Full underflow concentrates all mass on the nearest point in the
        // limit; count it as failing the rule.
        const double mass = total > 0.0 ? near / total : 1.0;
        if (mass <= 0.75) return {sigma, false};
    }
    return {grid.back(), true};
}

std::vector<double> sweep_grid(std::size_t m, std::size_t k) {
    if (k < 2) throw SchemaError("sweep_grid: need at least two points");
    const double lo = 1e-3;
    const double hi = 3.0 * static_cast<double>(m);
    std::vector<double> grid(k);
    const double step = std::log(hi / lo) / static_cast<double>(k - 1);
    for (std::size_t i = 0; i < k; ++i) {
        grid[i] = lo * std::exp(step * static_cast<double>(i));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

}  // namespace nbrshap
