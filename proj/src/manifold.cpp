#include "nbrshap/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nbrshap/parallel.hpp"
#include "nbrshap/simd.hpp"

namespace nbrshap {
namespace {

constexpr std::uint64_t kConcatStream = 0x434F4E43;
constexpr std::uint64_t kSplitStream = 0x53504C49;

std::size_t draw_from_cdf(std::span<const double> cdf, double u) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u * cdf.back());
    return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

Matrix generate_concatenations(std::span<const Instance> instances, const Dataset& refs,
                               const Weighting& weighting, std::size_t n, const Rng& rng) {
    if (instances.empty()) throw SchemaError("generate_concatenations: no instances");
    if (n == 0) throw SchemaError("generate_concatenations: n must be positive");
    const std::size_t m = refs.n_features();
    for (const auto& x : instances) check_same_width(x.size(), m, "generate_concatenations");

    // One cumulative weight table per distinct instance. Drawing through the
    // same inverse-CDF path for every weighting makes a flat kernel and
    // uniform weighting produce identical rows under one seed.
    std::vector<std::vector<double>> cdfs(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const ReferenceWeights w = reference_weights(weighting, instances[i], refs);
        cdfs[i].resize(w.w.size());
        double acc = 0.0;
        for (std::size_t l = 0; l < w.w.size(); ++l) {
            acc += w.w[l];
            cdfs[i][l] = acc;
        }
    }

    Rng gen = rng.child(kConcatStream);
    Matrix out;
    out.cols = m;
    out.data.resize(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t xi = instances.size() == 1 ? 0 : gen.below(instances.size());
        const auto size = static_cast<std::uint32_t>(gen.below(m));
        std::uint64_t mask = 0;
        for (std::uint32_t j : gen.subset(static_cast<std::uint32_t>(m), size)) {
            mask |= std::uint64_t{1} << j;
        }
        const std::size_t l = draw_from_cdf(cdfs[xi], gen.uniform01());
        double* dst = out.data.data() + i * m;
        const auto ref_row = refs.row(l);
        std::copy(ref_row.begin(), ref_row.end(), dst);
        for (std::size_t j = 0; j < m; ++j) {
            if ((mask >> j) & 1) dst[j] = instances[xi][j];
        }
    }
    return out;
}

std::vector<double> ood_knn_score(const Dataset& background, const Matrix& points,
                                  std::size_t k) {
    if (k == 0 || k > background.n_rows()) {
        throw SchemaError("ood_knn_score: need 1 <= k <= L");
    }
    check_same_width(points.cols, background.n_features(), "ood_knn_score");
    const std::size_t m = background.n_features();
    std::vector<double> scale(m), wcat(m, 1.0);
    for (std::size_t j = 0; j < m; ++j) scale[j] = 1.0 / background.stat(j).std;

    std::vector<double> scores(points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i) {
        auto d2 = squared_scaled_distances(points.row(i), background, scale, wcat,
                                           std::nullopt);
        std::nth_element(d2.begin(), d2.begin() + (k - 1), d2.end());
        scores[i] = std::sqrt(d2[k - 1]);
    }
    return scores;
}

double rank_auc(std::span<const double> negatives, std::span<const double> positives) {
    const std::size_t n_neg = negatives.size(), n_pos = positives.size();
    if (n_neg == 0 || n_pos == 0) throw SchemaError("rank_auc: empty sample");
    std::vector<std::pair<double, bool>> all;
    all.reserve(n_neg + n_pos);
    for (double v : negatives) all.emplace_back(v, false);
    for (double v : positives) all.emplace_back(v, true);
    std::stable_sort(all.begin(), all.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    // Rank sum of the positives with midranks over ties.
    double rank_pos = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j + 1 < all.size() && all[j + 1].first == all[i].first) ++j;
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) {
            if (all[t].second) rank_pos += midrank;
        }
        i = j + 1;
    }
    return (rank_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1)) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

AuditReport audit(std::span<const Instance> instances, const Dataset& refs,
                  const Weighting& weighting, std::size_t n, std::size_t k,
                  std::uint64_t seed, std::size_t threads) {
    (void)threads;
    if (refs.n_rows() < 4) throw SchemaError("audit: need at least four reference rows");
    const Rng root(seed);

    // Seeded shuffle, then half background / half held-out real rows.
    Rng split = root.child(kSplitStream);
    std::vector<std::size_t> order(refs.n_rows());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[split.below(i + 1)]);
    }
    const std::size_t half = refs.n_rows() / 2;
    const std::size_t m = refs.n_features();
    std::vector<double> bg_rows, real_rows;
    bg_rows.reserve(half * m);
    real_rows.reserve((refs.n_rows() - half) * m);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto row = refs.row(order[i]);
        auto& dst = i < half ? bg_rows : real_rows;
        dst.insert(dst.end(), row.begin(), row.end());
    }
    Dataset background(refs.names(), refs.kinds(), std::move(bg_rows));
    Matrix real{std::move(real_rows), m};

    AuditReport report;
    report.concatenated =
        generate_concatenations(instances, background, weighting, n, root);
    report.ood_scores_real = ood_knn_score(background, real, k);
    report.ood_scores_concat = ood_knn_score(background, report.concatenated, k);
    report.auc = rank_auc(report.ood_scores_real, report.ood_scores_concat);
    report.mean_manifold_distance =
        simd::sum(report.ood_scores_concat.data(), report.ood_scores_concat.size()) /
        static_cast<double>(report.ood_scores_concat.size());
    report.n = n;
    report.k = k;
    report.seed = seed;
    return report;
}

}  // namespace nbrshap
