#include "bsgd/common.hpp"

#include <algorithm>
#include <numeric>

namespace bsgd {

IndexList sample_without_replacement(Rng& rng, Index n, Index k) {
  if (k < 0 || k > n) throw Error("sample_without_replacement: k out of range");
  IndexList pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  if (k == n) return pool;
  // Partial Fisher-Yates.
  for (Index q = 0; q < k; ++q) {
    const auto pick = q + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - q)));
    std::swap(pool[static_cast<std::size_t>(q)], pool[static_cast<std::size_t>(pick)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

Index sample_weighted(Rng& rng, const std::vector<double>& weights) {
  if (weights.empty()) throw Error("sample_weighted: no weights");
  if (weights.size() == 1) return 0;
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = rng.uniform() * total;
  double acc = 0.0;
  Index last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    last_positive = static_cast<Index>(k);
    acc += weights[k];
    if (u < acc) return static_cast<Index>(k);
  }
  return last_positive;
}

}  // namespace bsgd
