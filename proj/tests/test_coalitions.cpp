#include <doctest.h>

#include <map>

#include "nbrshap/coalitions.hpp"

using namespace nbrshap;

TEST_CASE("enumerate_coalitions") {
    const auto all = enumerate_coalitions(2);
    REQUIRE(all.size() == 4);
    CHECK(all[0].mask == 0);
    CHECK(all[1].mask == 1);
    CHECK(all[2].mask == 2);
    CHECK(all[3].mask == 3);
    CHECK(enumerate_coalitions(5).size() == 32);
    CHECK_THROWS_AS(enumerate_coalitions(21), ExactModeUnavailable);
}

TEST_CASE("shapley_subset_weight values and normalization") {
    CHECK(shapley_subset_weight(3, 0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(shapley_subset_weight(3, 1) == doctest::Approx(1.0 / 6).epsilon(1e-15));
    CHECK(shapley_subset_weight(3, 2) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(shapley_subset_weight(1, 0) == doctest::Approx(1.0).epsilon(1e-15));

    // brute-force sum over all subsets excluding a fixed feature
    for (std::size_t m = 1; m <= 10; ++m) {
        double total = 0.0;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (m - 1)); ++mask) {
            total += shapley_subset_weight(m, Coalition{mask}.size());
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }

    // equal mass per size class
    for (std::size_t m = 2; m <= 8; ++m) {
        std::vector<double> per_size(m, 0.0);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (m - 1)); ++mask) {
            const auto s = Coalition{mask}.size();
            per_size[s] += shapley_subset_weight(m, s);
        }
        for (std::size_t k = 0; k < m; ++k) {
            CHECK(per_size[k] == doctest::Approx(1.0 / m).epsilon(1e-12));
        }
    }
}

TEST_CASE("kernelshap_weight") {
    CHECK(kernelshap_weight(3, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(kernelshap_weight(2, 1) == doctest::Approx(0.5).epsilon(1e-15));
    for (std::size_t m = 2; m <= 12; ++m) {
        for (std::size_t k = 1; k < m; ++k) {
            CHECK(kernelshap_weight(m, k) ==
                  doctest::Approx(kernelshap_weight(m, m - k)).epsilon(1e-12));
            CHECK(kernelshap_weight(m, k) > 0.0);
        }
    }
    CHECK_THROWS_AS(kernelshap_weight(4, 0), AnchorsAreConstraints);
    CHECK_THROWS_AS(kernelshap_weight(4, 4), AnchorsAreConstraints);
}

TEST_CASE("sample_coalitions determinism and exhaustion") {
    const auto a = sample_coalitions(6, 40, Rng(123));
    const auto b = sample_coalitions(6, 40, Rng(123));
    REQUIRE(a.coalitions.size() == b.coalitions.size());
    for (std::size_t i = 0; i < a.coalitions.size(); ++i) {
        CHECK(a.coalitions[i].mask == b.coalitions[i].mask);
        CHECK(a.reg_weight[i] == b.reg_weight[i]);
    }

    // C >= 2^M - 2 switches to complete enumeration with exact pi weights
    const auto ex = sample_coalitions(4, 14, Rng(9));
    CHECK(ex.exhaustive);
    REQUIRE(ex.coalitions.size() == 14);
    for (std::size_t i = 0; i < 14; ++i) {
        CHECK(ex.coalitions[i].mask == i + 1);
        CHECK(ex.reg_weight[i] ==
              doctest::Approx(kernelshap_weight(4, ex.coalitions[i].size())).epsilon(1e-15));
    }
}

TEST_CASE("sampled coalitions avoid anchors and fold duplicates") {
    const auto s = sample_coalitions(4, 9, Rng(7));
    CHECK_FALSE(s.exhaustive);
    double total = 0.0;
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i < s.coalitions.size(); ++i) {
        CHECK(s.coalitions[i].mask != 0);
        CHECK(s.coalitions[i].mask != 15);
        if (i) CHECK(s.coalitions[i].mask > prev);
        prev = s.coalitions[i].mask;
        total += s.reg_weight[i];
    }
    CHECK(total == doctest::Approx(9.0).epsilon(1e-12));  // multiplicities sum to C
}

TEST_CASE("size histogram matches the pi-induced distribution (chi-squared, 20 seeds)") {
    const std::size_t m = 10;
    const std::size_t c = 1000;
    // analytic size distribution: P(k) proportional to 1/(k(M-k))
    std::vector<double> pk(m - 1);
    double norm = 0.0;
    for (std::size_t k = 1; k < m; ++k) {
        pk[k - 1] = 1.0 / (static_cast<double>(k) * static_cast<double>(m - k));
        norm += pk[k - 1];
    }
    for (double& p : pk) p /= norm;

    const double critical = 20.09;  // chi2 0.99 quantile, df = 8
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto s = sample_coalitions(m, c, Rng(seed));
        std::vector<double> counts(m - 1, 0.0);
        for (std::size_t i = 0; i < s.coalitions.size(); ++i) {
            counts[s.coalitions[i].size() - 1] += s.reg_weight[i];
        }
        double chi2 = 0.0;
        for (std::size_t k = 0; k < m - 1; ++k) {
            const double expected = static_cast<double>(c) * pk[k];
            chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
        }
        CHECK(chi2 < critical);
    }
}
