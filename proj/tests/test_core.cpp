#include <doctest.h>

#include <thread>

#include "helpers/test_support.hpp"
#include "nbrshap/blackbox.hpp"
#include "nbrshap/builtins.hpp"
#include "nbrshap/parallel.hpp"

using namespace nbrshap;
using testing::LambdaBox;

namespace {

Dataset two_feature_refs() {
    return Dataset::from_rows({"a", "b"},
                              {FeatureKind::continuous, FeatureKind::continuous},
                              {{0.0, 0.0}, {2.0, 2.0}});
}

}  // namespace

TEST_CASE("concatenate picks x on S and ref elsewhere") {
    const Instance x{{1.0, 2.0}};
    const Instance ref{{9.0, 9.0}};
    CHECK(concatenate(x, ref, Coalition{0b01}).values == std::vector<double>{1.0, 9.0});
    CHECK(concatenate(x, ref, Coalition::full(2)).values == x.values);
    CHECK(concatenate(x, ref, Coalition::empty()).values == ref.values);
}

TEST_CASE("concatenate partition property: S and its complement swap roles") {
    Rng rng(1);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t m = 1 + rng.below(8);
        Instance x{{}}, ref{{}};
        for (std::size_t j = 0; j < m; ++j) {
            x.values.push_back(rng.normal());
            ref.values.push_back(rng.normal());
        }
        const Coalition s{rng.below(std::uint64_t{1} << m)};
        const auto ab = concatenate(x, ref, s);
        const auto ba = concatenate(ref, x, s.complement(m));
        CHECK(ab.values == ba.values);
    }
}

TEST_CASE("concatenate rejects mismatched widths") {
    CHECK_THROWS_AS(concatenate(Instance{{1.0}}, Instance{{1.0, 2.0}}, Coalition{0}),
                    SchemaError);
}

TEST_CASE("dataset standardization and zero-variance flag") {
    const auto ds = Dataset::from_rows(
        {"a", "b", "c"},
        {FeatureKind::continuous, FeatureKind::continuous, FeatureKind::categorical},
        {{0.0, 5.0, 1.0}, {2.0, 5.0, 2.0}, {4.0, 5.0, 1.0}});
    CHECK(ds.stat(0).mean == doctest::Approx(2.0));
    CHECK(ds.stat(0).std == doctest::Approx(std::sqrt(8.0 / 3.0)));
    CHECK(ds.stat(1).std == 1.0);  // constant column
    CHECK(ds.stat(1).zero_variance);
    CHECK(ds.stat(2).std == 1.0);  // categorical: indicator distance
    CHECK_FALSE(ds.stat(2).zero_variance);
    CHECK(ds.has_zero_variance_features());

    CHECK(ds.column(0)[1] == 2.0);
    CHECK(ds.at(1, 0) == 2.0);
}

TEST_CASE("masked_eval basics") {
    const auto refs = two_feature_refs();
    const Instance x{{1.0, 1.0}};
    EvalLedger ledger;

    SUBCASE("constant black box") {
        const auto bb = make_builtin({"constant", {5.0}});
        const auto out = ledger.masked_eval(*bb, x, refs, Coalition{0b01});
        CHECK(out == std::vector<double>{5.0, 5.0});
    }

    SUBCASE("sum box, S={1}") {
        LambdaBox bb([](std::span<const double> r) { return r[0] + r[1]; });
        const auto out = ledger.masked_eval(*&bb, x, refs, Coalition{0b01});
        CHECK(out == std::vector<double>{1.0, 3.0});
    }

    SUBCASE("cache contract: repeat call leaves the counter unchanged") {
        LambdaBox bb([](std::span<const double> r) { return r[0] + r[1]; });
        const auto out1 = ledger.masked_eval(bb, x, refs, Coalition{0b10});
        const auto count = ledger.eval_count();
        CHECK(count == 2);
        const auto out2 = ledger.masked_eval(bb, x, refs, Coalition{0b10});
        CHECK(out1 == out2);
        CHECK(ledger.eval_count() == count);
    }

    SUBCASE("full coalition is constant across references and equals bb(x)") {
        LambdaBox bb([](std::span<const double> r) { return 3.0 * r[0] - r[1]; });
        const auto out = ledger.masked_eval(bb, x, refs, Coalition::full(2));
        CHECK(out[0] == 2.0);
        CHECK(out[1] == 2.0);
    }
}

TEST_CASE("masked_eval_single shares the cache with batch calls") {
    const auto refs = two_feature_refs();
    const Instance x{{1.0, 1.0}};
    EvalLedger ledger;
    LambdaBox bb([](std::span<const double> r) { return r[0] * 10.0 + r[1]; });
    const double single = ledger.masked_eval_single(bb, x, refs, Coalition{0b01}, 1);
    CHECK(single == 12.0);
    CHECK(ledger.eval_count() == 1);
    const auto batch = ledger.masked_eval(bb, x, refs, Coalition{0b01});
    CHECK(batch[1] == single);
    CHECK(ledger.eval_count() == 2);  // only the uncached row was evaluated
}

TEST_CASE("black-box failure carries the offending row index") {
    const auto refs = two_feature_refs();
    EvalLedger ledger;
    LambdaBox bb([](std::span<const double> r) -> double {
        if (r[0] > 1.0) throw std::runtime_error("boom");
        return 0.0;
    });
    CHECK_THROWS_AS(ledger.masked_eval(bb, Instance{{1.0, 1.0}}, refs, Coalition::empty()),
                    BlackBoxError);
}

TEST_CASE("distinct instances get distinct cache slots, equal vectors share") {
    EvalLedger ledger;
    CHECK(ledger.instance_id(std::vector<double>{1.0, 2.0}) == 0);
    CHECK(ledger.instance_id(std::vector<double>{3.0, 4.0}) == 1);
    CHECK(ledger.instance_id(std::vector<double>{1.0, 2.0}) == 0);
}

TEST_CASE("concurrent masked_eval callers do not double-count") {
    Rng rng(11);
    auto refs = testing::normal_dataset(rng, 64, 3);
    const Instance x{{0.1, 0.2, 0.3}};
    EvalLedger ledger;
    LambdaBox bb([](std::span<const double> r) { return r[0] + r[1] + r[2]; });
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&] {
            for (std::uint64_t mask = 0; mask < 8; ++mask) {
                (void)ledger.masked_eval(bb, x, refs, Coalition{mask});
            }
        });
    }
    for (auto& t : threads) t.join();
    CHECK(ledger.eval_count() == 8 * 64);
}

TEST_CASE("parallel_for covers the range once and propagates errors") {
    std::vector<int> hits(100, 0);
    parallel_for(100, 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                     if (i == 7) throw SchemaError("x");
                                 }),
                    SchemaError);
}
