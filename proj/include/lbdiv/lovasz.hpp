#pragma once

// The Lovasz extension of a set function, its extreme subgradients h_sigma
// (one per permutation) and the tie-averaged subgradient map.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "lbdiv/error.hpp"
#include "lbdiv/permutation.hpp"
#include "lbdiv/submodular.hpp"

namespace lbdiv {

inline constexpr std::uint64_t kDefaultEnumerationCap = 40320;  // 8!

struct ExtremeSubgradient {
  std::vector<double> values;  // indexed by 0-based item
  Permutation order;

  // h(item), 1-based.
  double operator()(std::size_t item) const { return values.at(item - 1); }
};

inline ExtremeSubgradient extreme_subgradient(const SetFunction& f, const Permutation& sigma) {
  return {f.chain_gains(sigma), sigma};
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  detail::require_same_length("dot", a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Greedy (Choquet) form: sum_j x(sigma_x(j)) (f(S_j) - f(S_{j-1})). Any
// ordering consistent with x gives the same value.
inline double lovasz_extension(const SetFunction& f, std::span<const double> x) {
  detail::require_same_length("lovasz_extension", f.ground_size(), x.size());
  return dot(f.chain_gains(induced_ordering(x)), x);
}

// Maximal blocks of equal scores, in descending score order; each block
// lists 0-based items in ascending index order.
inline std::vector<std::vector<std::size_t>> tie_blocks(std::span<const double> y) {
  const auto sigma = induced_ordering(y);
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t r = 0; r < y.size(); ++r) {
    const std::size_t item = sigma.items0()[r];
    if (r == 0 || y[item] != y[sigma.items0()[r - 1]]) blocks.emplace_back();
    blocks.back().push_back(item);
  }
  return blocks;
}

// |Sigma_y| = product of block factorials; 0 if it overflows 64 bits.
inline std::uint64_t count_consistent_orderings(std::span<const double> y) {
  std::uint64_t total = 1;
  for (const auto& block : tie_blocks(y)) {
    const auto f = factorial(block.size());
    if (f == 0 || total > UINT64_MAX / f) return 0;
    total *= f;
  }
  return total;
}

// Every permutation in Sigma_y (orderings of y with ties in any order).
inline std::vector<Permutation> consistent_orderings(std::span<const double> y,
                                                     std::uint64_t cap = kDefaultEnumerationCap) {
  const auto count = count_consistent_orderings(y);
  if (count == 0 || count > cap)
    throw LimitError("tie-consistent orderings exceed enumeration cap " + std::to_string(cap));
  auto blocks = tie_blocks(y);
  std::vector<Permutation> out;
  out.reserve(count);
  // Odometer over per-block permutations; the last block varies fastest.
  for (;;) {
    std::vector<std::size_t> items;
    items.reserve(y.size());
    for (const auto& b : blocks) items.insert(items.end(), b.begin(), b.end());
    out.push_back(Permutation::from_zero_based(std::move(items)));
    std::size_t b = blocks.size();
    while (b > 0 && !std::next_permutation(blocks[b - 1].begin(), blocks[b - 1].end())) --b;
    if (b == 0) break;
  }
  return out;
}

struct AveragedSubgradientOptions {
  std::uint64_t cap = kDefaultEnumerationCap;
  // Pin the map to 0 at y = 0 instead of averaging all n! extreme points.
  bool zero_at_origin = false;
};

// Mean of h_sigma over sigma in Sigma_y.
inline std::vector<double> averaged_subgradient(const SetFunction& f, std::span<const double> y,
                                                const AveragedSubgradientOptions& opts = {}) {
  detail::require_same_length("averaged_subgradient", f.ground_size(), y.size());
  if (opts.zero_at_origin && std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; }))
    return std::vector<double>(y.size(), 0.0);
  const auto orders = consistent_orderings(y, opts.cap);
  std::vector<double> mean(y.size(), 0.0);
  for (const auto& sigma : orders) {
    const auto h = f.chain_gains(sigma);
    for (std::size_t i = 0; i < h.size(); ++i) mean[i] += h[i];
  }
  for (auto& v : mean) v /= static_cast<double>(orders.size());
  return mean;
}

// Proxy for "the polyhedron has all n! extreme points": every pair of
// extreme subgradients differs by more than `tol` in some coordinate.
// Exhaustive, n <= 8.
inline bool has_distinct_extreme_points(const SetFunction& f, double tol = kStructureTolerance) {
  const std::size_t n = f.ground_size();
  if (n > 8) throw LimitError("extreme point check needs n <= 8");
  std::vector<std::vector<double>> points;
  for_each_permutation(n, [&](const Permutation& p) { points.push_back(f.chain_gains(p)); });
  std::sort(points.begin(), points.end());
  for (std::size_t a = 0; a + 1 < points.size(); ++a) {
    bool differ = false;
    for (std::size_t i = 0; i < n && !differ; ++i)
      differ = std::abs(points[a][i] - points[a + 1][i]) > tol;
    if (!differ) return false;
  }
  return true;
}

}  // namespace lbdiv
