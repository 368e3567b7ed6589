#pragma once

// Lovasz-Bregman divergence d_f(x || sigma) = <x, h_{sigma_x} - h_sigma>
// between a score vector and a permutation, its closed forms for the common
// generator families, and the ranking losses (NDCG, AUC) it subsumes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lbdiv/error.hpp"
#include "lbdiv/lovasz.hpp"
#include "lbdiv/permutation.hpp"
#include "lbdiv/submodular.hpp"

namespace lbdiv {

// Results in [-kClampTolerance, 0) are reported as 0.
inline constexpr double kClampTolerance = 1e-12;

namespace detail {

inline double clamp_small_negative(double v) {
  return (v < 0.0 && v >= -kClampTolerance) ? 0.0 : v;
}

// x is non-increasing along sigma, i.e. sigma is in Sigma_x.
inline bool consistent_with(std::span<const double> x, const Permutation& sigma) {
  const auto order = sigma.items0();
  for (std::size_t r = 0; r + 1 < order.size(); ++r)
    if (x[order[r]] < x[order[r + 1]]) return false;
  return true;
}

}  // namespace detail

// Generic form; every specialised form below is checked against it.
inline double lb_divergence(const SetFunction& f, std::span<const double> x,
                            const Permutation& sigma, TieRule rule = TieRule::LowestIndexFirst) {
  detail::require_same_length("lb_divergence: scores", f.ground_size(), x.size());
  detail::require_same_length("lb_divergence: permutation", f.ground_size(), sigma.size());
  const auto sigma_x = induced_ordering(x, rule);
  if (detail::consistent_with(x, sigma)) return 0.0;
  const auto hx = f.chain_gains(sigma_x);
  const auto hs = f.chain_gains(sigma);
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += x[i] * (hx[i] - hs[i]);
  return detail::clamp_small_negative(d);
}

// f(X) = g(|X|): sum_i (x(sigma_x(i)) - x(sigma(i))) delta_g(i).
inline double lb_cardinality(const GainTable& gains, std::span<const double> x,
                             const Permutation& sigma) {
  detail::require_same_length("lb_cardinality: gain table", x.size(), gains.size());
  detail::require_same_length("lb_cardinality: permutation", x.size(), sigma.size());
  const auto sigma_x = induced_ordering(x);
  double d = 0.0;
  for (std::size_t r = 0; r < x.size(); ++r)
    d += (x[sigma_x.items0()[r]] - x[sigma.items0()[r]]) * gains.gains()[r];
  return detail::clamp_small_negative(d);
}

// f(X) = min{g(|X|), g(m)}: only the first m ranks contribute. The gain
// table needs at least m entries.
inline double lb_top_m(const GainTable& gains, std::size_t m, std::span<const double> x,
                       const Permutation& sigma) {
  detail::require_same_length("lb_top_m: permutation", x.size(), sigma.size());
  if (m < 1 || m > x.size())
    throw DomainError("lb_top_m: cutoff m=" + std::to_string(m) + " outside 1.." +
                      std::to_string(x.size()));
  if (gains.size() < m) throw DimensionError("lb_top_m: gain table", m, gains.size());
  const auto sigma_x = induced_ordering(x);
  double d = 0.0;
  for (std::size_t r = 0; r < m; ++r)
    d += (x[sigma_x.items0()[r]] - x[sigma.items0()[r]]) * gains.gains()[r];
  return detail::clamp_small_negative(d);
}

// Graph cut f(X) = sum_{i in X, j not in X} W_ij, written over the pairs of
// sigma that sigma_x orders the other way:
//   orientation_count * sum_{i<j} W(s_i,s_j) |x(s_i) - x(s_j)| I(discordant).
// orientation_count = 2 matches lb_divergence(GraphCut(W)); 1 is the
// one-orientation pairwise convention (Kendall tau, AUC).
inline double lb_cut(const WeightMatrix& w, std::span<const double> x, const Permutation& sigma,
                     int orientation_count = 2) {
  if (orientation_count != 1 && orientation_count != 2)
    throw DomainError("lb_cut: orientation_count must be 1 or 2");
  detail::require_same_length("lb_cut: weight matrix", x.size(), w.size());
  detail::require_same_length("lb_cut: permutation", x.size(), sigma.size());
  w.validate();
  const auto sigma_x = induced_ordering(x);
  const auto rank_x = sigma_x.ranks0();
  const auto order = sigma.items0();
  double d = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const std::size_t a = order[i], b = order[j];
      if (rank_x[a] > rank_x[b]) d += w.at0(a, b) * std::abs(x[a] - x[b]);
    }
  }
  return orientation_count * d;
}

// f(X) = min{|X|, 1}: max_j x_j - x(sigma(1)).
inline double lb_max(std::span<const double> x, const Permutation& sigma) {
  detail::require_same_length("lb_max: permutation", x.size(), sigma.size());
  return *std::max_element(x.begin(), x.end()) - x[sigma.items0().front()];
}

// f(X) = I(1 <= |X| <= n-1):
//   max x - x(sigma(1)) - min x + x(sigma(n)).
inline double lb_range(std::span<const double> x, const Permutation& sigma) {
  detail::require_same_length("lb_range: permutation", x.size(), sigma.size());
  if (x.size() < 2) return 0.0;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - x[sigma.items0().front()] - *lo + x[sigma.items0().back()];
}

// Positional discounts D(1) >= ... >= D(k) > 0 with cutoff k.
class DiscountProfile {
 public:
  explicit DiscountProfile(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError("discount profile needs at least one value");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
        throw DomainError("discount values must be finite and positive");
      if (i && values_[i] > values_[i - 1])
        throw DomainError("discount values must be non-increasing");
    }
  }
  // D(i) = 1 / log2(i + 1), i = 1..k.
  static DiscountProfile log2(std::size_t k) {
    std::vector<double> d(k);
    for (std::size_t i = 1; i <= k; ++i) d[i - 1] = 1.0 / std::log2(static_cast<double>(i) + 1.0);
    return DiscountProfile(std::move(d));
  }

  std::size_t cutoff() const { return values_.size(); }
  double operator()(std::size_t i) const { return values_.at(i - 1); }
  std::span<const double> values() const { return values_; }
  GainTable as_gains() const { return GainTable(values_); }

 private:
  std::vector<double> values_;
};

struct NdcgTerms {
  double ideal_dcg;
  double dcg;
  double loss;  // (ideal_dcg - dcg) / ideal_dcg
};

inline NdcgTerms ndcg_terms(std::span<const double> relevance, const Permutation& sigma,
                            const DiscountProfile& discount,
                            TieRule rule = TieRule::LowestIndexFirst) {
  detail::require_same_length("ndcg_loss: permutation", relevance.size(), sigma.size());
  if (discount.cutoff() > relevance.size())
    throw DomainError("ndcg_loss: cutoff exceeds number of documents");
  bool positive = false;
  for (double r : relevance) {
    if (r < 0.0 || !std::isfinite(r)) throw DomainError("ndcg_loss: relevance must be non-negative");
    positive = positive || r > 0.0;
  }
  if (!positive) throw DomainError("ndcg_loss: relevance vector is all zero");
  const auto ideal = induced_ordering(relevance, rule);
  NdcgTerms t{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < discount.cutoff(); ++i) {
    t.ideal_dcg += relevance[ideal.items0()[i]] * discount.values()[i];
    t.dcg += relevance[sigma.items0()[i]] * discount.values()[i];
  }
  t.loss = detail::clamp_small_negative((t.ideal_dcg - t.dcg) / t.ideal_dcg);
  return t;
}

inline double ndcg_loss(std::span<const double> relevance, const Permutation& sigma,
                        const DiscountProfile& discount) {
  return ndcg_terms(relevance, sigma, discount).loss;
}

// Fraction of (good, bad) pairs that sigma ranks bad-above-good. Items are
// 1-based.
inline double auc_loss(std::span<const std::size_t> good, std::span<const std::size_t> bad,
                       const Permutation& sigma) {
  if (good.empty() || bad.empty()) throw DomainError("auc_loss: both classes must be non-empty");
  std::set<std::size_t> seen;
  for (auto item : good) {
    if (item < 1 || item > sigma.size()) throw DomainError("auc_loss: item out of range");
    if (!seen.insert(item).second) throw DomainError("auc_loss: repeated item");
  }
  for (auto item : bad) {
    if (item < 1 || item > sigma.size()) throw DomainError("auc_loss: item out of range");
    if (!seen.insert(item).second) throw DomainError("auc_loss: good and bad overlap");
  }
  std::size_t inverted = 0;
  for (auto g : good)
    for (auto b : bad)
      if (sigma.rank_of(g) > sigma.rank_of(b)) ++inverted;
  return static_cast<double>(inverted) / static_cast<double>(good.size() * bad.size());
}

struct OrderConstraint {
  std::size_t above;  // 1-based
  std::size_t below;  // 1-based
  double weight = 1.0;
};

class PartialOrder {
 public:
  PartialOrder() = default;
  explicit PartialOrder(std::vector<OrderConstraint> constraints)
      : constraints_(std::move(constraints)) {
    for (const auto& c : constraints_) {
      if (c.above == c.below) throw DomainError("partial order pairs an item with itself");
      if (c.above < 1 || c.below < 1) throw DomainError("partial order items are 1-based");
      if (!(c.weight > 0.0) || !std::isfinite(c.weight))
        throw DomainError("partial order weights must be positive");
    }
  }
  const std::vector<OrderConstraint>& constraints() const { return constraints_; }

 private:
  std::vector<OrderConstraint> constraints_;
};

// sum over constraints of w * max(x(below) - x(above), 0).
inline double partial_order_distortion(const PartialOrder& order, std::span<const double> x) {
  double d = 0.0;
  for (const auto& c : order.constraints()) {
    if (c.above > x.size() || c.below > x.size())
      throw DomainError("partial order references item beyond " + std::to_string(x.size()));
    d += c.weight * std::max(x[c.below - 1] - x[c.above - 1], 0.0);
  }
  return d;
}

// eps * n * (max_j f({j}) - min_j f(j | V - j)), eps = max x - min x. Bounds
// lb_divergence(f, x, sigma) from above for every sigma.
inline double confidence_bound(const SetFunction& f, std::span<const double> x) {
  const std::size_t n = f.ground_size();
  detail::require_same_length("confidence_bound", n, x.size());
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double eps = *hi - *lo;
  if (eps == 0.0) return 0.0;
  const Subset empty(n);
  Subset rest = Subset::full(n);
  double max_single = -INFINITY, min_last = INFINITY;
  for (std::size_t j = 1; j <= n; ++j) {
    max_single = std::max(max_single, f.marginal_gain(j, empty));
    rest.erase(j);
    min_last = std::min(min_last, f.marginal_gain(j, rest));
    rest.insert(j);
  }
  return eps * static_cast<double>(n) * (max_single - min_last);
}

}  // namespace lbdiv
