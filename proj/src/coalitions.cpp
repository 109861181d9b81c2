#include "nbrshap/coalitions.hpp"

#include <algorithm>
#include <map>

namespace nbrshap {
namespace {

double binom(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        c *= static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return c;
}

}  // namespace

std::vector<Coalition> enumerate_coalitions(std::size_t m) {
    if (m > 20) throw ExactModeUnavailable(m);
    if (m == 0) throw SchemaError("enumerate_coalitions: M must be positive");
    const std::uint64_t count = std::uint64_t{1} << m;
    std::vector<Coalition> out;
    out.reserve(count);
    for (std::uint64_t mask = 0; mask < count; ++mask) out.push_back({mask});
    return out;
}

double shapley_subset_weight(std::size_t m, std::size_t subset_size) {
    if (m == 0 || subset_size > m - 1) {
        throw SchemaError("shapley_subset_weight: need |S| <= M-1");
    }
    return 1.0 / (static_cast<double>(m) * binom(m - 1, subset_size));
}

double kernelshap_weight(std::size_t m, std::size_t size) {
    if (size == 0 || size >= m) throw AnchorsAreConstraints();
    return static_cast<double>(m - 1) /
           (binom(m, size) * static_cast<double>(size) * static_cast<double>(m - size));
}

CoalitionSample sample_coalitions(std::size_t m, std::size_t c, const Rng& rng) {
    if (m < 2) throw SchemaError("sample_coalitions: M must be >= 2");
    if (c < 2) throw SchemaError("sample_coalitions: C must be >= 2");

    CoalitionSample out;
    if (m <= 20 && c >= (std::uint64_t{1} << m) - 2) {
        const std::uint64_t full = (std::uint64_t{1} << m) - 1;
        for (std::uint64_t mask = 1; mask < full; ++mask) {
            out.coalitions.push_back({mask});
            out.reg_weight.push_back(kernelshap_weight(m, Coalition{mask}.size()));
        }
        out.exhaustive = true;
        return out;
    }

    // Size distribution induced by pi: P(k) proportional to pi(k)*binom(M,k)
    // = (M-1)/(k(M-k)). Symmetric, so emitting each draw together with its
    // complement leaves the marginal unchanged while pairing antithetic
    // coalitions.
    std::vector<double> size_cdf(m - 1);
    double total = 0.0;
    for (std::size_t k = 1; k < m; ++k) {
        total += 1.0 / (static_cast<double>(k) * static_cast<double>(m - k));
        size_cdf[k - 1] = total;
    }
    Rng gen = rng;
    std::map<std::uint64_t, double> multiplicity;
    const std::uint64_t full = m >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
    std::size_t drawn = 0;
    while (drawn < c) {
        const double u = gen.uniform01() * total;
        std::size_t k = 1;
        while (k < m - 1 && size_cdf[k - 1] < u) ++k;
        std::uint64_t mask = 0;
        for (std::uint32_t j : gen.subset(static_cast<std::uint32_t>(m),
                                          static_cast<std::uint32_t>(k))) {
            mask |= std::uint64_t{1} << j;
        }
        multiplicity[mask] += 1.0;
        ++drawn;
        if (drawn < c) {
            multiplicity[full & ~mask] += 1.0;
            ++drawn;
        }
    }
    for (const auto& [mask, count] : multiplicity) {
        out.coalitions.push_back({mask});
        out.reg_weight.push_back(count);
    }
    return out;
}

}  // namespace nbrshap
