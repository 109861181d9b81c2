#include "nbrshap/fidelity.hpp"

#include <cmath>

namespace nbrshap {
namespace {

constexpr std::uint64_t kFidelityStream = 0x46494445;

}  // namespace

FidelityReport local_fidelity(const Attribution& attr, const BlackBox& bb,
                              EvalLedger& ledger, const Instance& x, const Dataset& refs,
                              double eval_sigma, std::size_t n, const Rng& rng) {
    const std::size_t m = x.size();
    check_same_width(m, refs.n_features(), "local_fidelity");
    check_same_width(m, attr.phi.size(), "local_fidelity attribution");
    if (n == 0) throw SchemaError("local_fidelity: n must be positive");
    if (!(eval_sigma > 0.0)) throw SchemaError("local_fidelity: eval_sigma must be > 0");

    Rng gen = rng.child(kFidelityStream);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto size = static_cast<std::uint32_t>(gen.below(m));
        std::uint64_t mask = 0;
        for (std::uint32_t j : gen.subset(static_cast<std::uint32_t>(m), size)) {
            mask |= std::uint64_t{1} << j;
        }
        const Coalition s{mask};
        const std::size_t l = gen.below(refs.n_rows());
        const double f = ledger.masked_eval_single(bb, x, refs, s, l);
        double g = attr.phi0;
        for (std::size_t j = 0; j < m; ++j) {
            if (s.contains(j)) g += attr.phi[j];
        }
        const double d = distance(x, refs.instance(l), refs.stats(), refs.kinds());
        const double u = std::exp(-(d * d) / (eval_sigma * eval_sigma));
        const double r = g - f;
        num = std::fma(u, r * r, num);
        den += u;
    }
    FidelityReport report;
    report.weighted_mse = den > 0.0 ? num / den : 0.0;
    report.n_samples = n;
    report.eval_sigma = eval_sigma;
    report.attribution_id = attr.meta.estimator;
    return report;
}

}  // namespace nbrshap
