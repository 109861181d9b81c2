#include "nbrshap/rng.hpp"

#include <algorithm>
#include <numeric>

namespace nbrshap {

std::vector<std::uint32_t> Rng::subset(std::uint32_t pool, std::uint32_t k) {
    std::vector<std::uint32_t> idx(pool);
    std::iota(idx.begin(), idx.end(), 0u);
    for (std::uint32_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::uint32_t>(below(pool - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace nbrshap
