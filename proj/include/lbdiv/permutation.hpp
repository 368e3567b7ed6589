#pragma once

// Permutations over [n], score-induced orderings and the classical
// permutation metrics (Kendall tau, Spearman footrule, rank correlation).
//
// Convention: sigma(i) is the item placed at rank i. Items and ranks are
// 1-based at every public interface; storage is 0-based.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "lbdiv/error.hpp"

namespace lbdiv {

enum class TieRule {
  LowestIndexFirst,  // equal scores ordered by ascending item index
  Reject,            // equal scores are an error
};

class Permutation {
 public:
  Permutation() = default;

  // `one_based[i-1]` is the item at rank i.
  explicit Permutation(std::span<const std::size_t> one_based) {
    items_.resize(one_based.size());
    inverse_.assign(one_based.size(), kUnset);
    for (std::size_t r = 0; r < one_based.size(); ++r) {
      const std::size_t item = one_based[r];
      if (item < 1 || item > one_based.size())
        throw DomainError("permutation entry " + std::to_string(item) +
                          " outside 1.." + std::to_string(one_based.size()));
      if (inverse_[item - 1] != kUnset)
        throw DomainError("permutation repeats item " + std::to_string(item));
      items_[r] = item - 1;
      inverse_[item - 1] = r;
    }
  }
  Permutation(std::initializer_list<std::size_t> one_based)
      : Permutation(std::span<const std::size_t>(one_based.begin(), one_based.size())) {}
  explicit Permutation(const std::vector<std::size_t>& one_based)
      : Permutation(std::span<const std::size_t>(one_based)) {}

  static Permutation identity(std::size_t n) {
    Permutation p;
    p.items_.resize(n);
    std::iota(p.items_.begin(), p.items_.end(), std::size_t{0});
    p.inverse_ = p.items_;
    return p;
  }

  // Builds from 0-based items; `items0[r]` is the item at rank r.
  static Permutation from_zero_based(std::vector<std::size_t> items0) {
    Permutation p;
    p.inverse_.assign(items0.size(), kUnset);
    for (std::size_t r = 0; r < items0.size(); ++r) {
      if (items0[r] >= items0.size() || p.inverse_[items0[r]] != kUnset)
        throw DomainError("not a permutation");
      p.inverse_[items0[r]] = r;
    }
    p.items_ = std::move(items0);
    return p;
  }

  std::size_t size() const { return items_.size(); }

  // Item at 1-based rank.
  std::size_t operator()(std::size_t rank) const { return items_.at(rank - 1) + 1; }
  // 1-based rank of a 1-based item.
  std::size_t rank_of(std::size_t item) const { return inverse_.at(item - 1) + 1; }

  Permutation inverse() const {
    Permutation p;
    p.items_ = inverse_;
    p.inverse_ = items_;
    return p;
  }

  std::vector<std::size_t> one_based() const {
    std::vector<std::size_t> out(items_.size());
    for (std::size_t r = 0; r < items_.size(); ++r) out[r] = items_[r] + 1;
    return out;
  }

  std::span<const std::size_t> items0() const { return items_; }
  std::span<const std::size_t> ranks0() const { return inverse_; }

  friend bool operator==(const Permutation& a, const Permutation& b) {
    return a.items_ == b.items_;
  }
  friend bool operator<(const Permutation& a, const Permutation& b) {
    return a.items_ < b.items_;
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t r = 0; r < items_.size(); ++r) {
      if (r) s += ",";
      s += std::to_string(items_[r] + 1);
    }
    return s + ")";
  }

  friend std::ostream& operator<<(std::ostream& os, const Permutation& p) { return os << p.to_string(); }

 private:
  static constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> items_;
  std::vector<std::size_t> inverse_;
};

namespace detail {

inline void require_same_length(const char* op, std::size_t a, std::size_t b) {
  if (a != b) throw DimensionError(op, a, b);
}

}  // namespace detail

// sigma_x: x(sigma(1)) >= x(sigma(2)) >= ... >= x(sigma(n)).
inline Permutation induced_ordering(std::span<const double> x,
                                    TieRule rule = TieRule::LowestIndexFirst) {
  if (x.empty()) throw DomainError("induced_ordering: empty score vector");
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  if (rule == TieRule::Reject) {
    std::vector<std::size_t> tied;
    for (std::size_t r = 0; r + 1 < order.size(); ++r) {
      if (x[order[r]] == x[order[r + 1]]) {
        if (tied.empty() || tied.back() != order[r] + 1) tied.push_back(order[r] + 1);
        tied.push_back(order[r + 1] + 1);
      }
    }
    if (!tied.empty()) {
      std::sort(tied.begin(), tied.end());
      throw TieError(std::move(tied));
    }
  }
  return Permutation::from_zero_based(std::move(order));
}

// (sigma pi)(i) = sigma(pi(i)).
inline Permutation compose(const Permutation& sigma, const Permutation& pi) {
  detail::require_same_length("compose", sigma.size(), pi.size());
  std::vector<std::size_t> out(sigma.size());
  for (std::size_t i = 0; i < pi.size(); ++i) out[i] = sigma.items0()[pi.items0()[i]];
  return Permutation::from_zero_based(std::move(out));
}

// (tau x)(i) = x(tau^{-1}(i)).
inline std::vector<double> relabel_scores(const Permutation& tau, std::span<const double> x) {
  detail::require_same_length("relabel_scores", tau.size(), x.size());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[tau.ranks0()[i]];
  return out;
}

// Number of pairs i<j with sigma^{-1} pi(i) > sigma^{-1} pi(j), counted by
// merge sort in O(n log n).
inline std::uint64_t kendall_tau(const Permutation& sigma, const Permutation& pi) {
  detail::require_same_length("kendall_tau", sigma.size(), pi.size());
  const std::size_t n = sigma.size();
  std::vector<std::size_t> seq(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) seq[i] = sigma.ranks0()[pi.items0()[i]];
  std::uint64_t inversions = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t a = lo, b = mid, out = lo;
      while (a < mid && b < hi) {
        if (seq[b] < seq[a]) {
          inversions += mid - a;
          buf[out++] = seq[b++];
        } else {
          buf[out++] = seq[a++];
        }
      }
      while (a < mid) buf[out++] = seq[a++];
      while (b < hi) buf[out++] = seq[b++];
    }
    std::swap(seq, buf);
  }
  return inversions;
}

inline std::uint64_t spearman_footrule(const Permutation& sigma, const Permutation& pi) {
  detail::require_same_length("spearman_footrule", sigma.size(), pi.size());
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    const auto a = sigma.ranks0()[i], b = pi.ranks0()[i];
    total += a > b ? a - b : b - a;
  }
  return total;
}

inline std::uint64_t rank_correlation(const Permutation& sigma, const Permutation& pi) {
  detail::require_same_length("rank_correlation", sigma.size(), pi.size());
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    const auto a = sigma.ranks0()[i], b = pi.ranks0()[i];
    const std::uint64_t d = a > b ? a - b : b - a;
    total += d * d;
  }
  return total;
}

// n!, or 0 on overflow of 64 bits.
inline std::uint64_t factorial(std::size_t n) {
  std::uint64_t out = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    if (out > UINT64_MAX / i) return 0;
    out *= i;
  }
  return out;
}

// Visits every permutation of [n] in lexicographic order of the 1-based
// mapping. The visitor receives a Permutation; returning false stops early.
template <typename Visitor>
void for_each_permutation(std::size_t n, Visitor&& visit) {
  std::vector<std::size_t> items(n);
  std::iota(items.begin(), items.end(), std::size_t{0});
  do {
    if constexpr (std::is_same_v<decltype(visit(Permutation{})), bool>) {
      if (!visit(Permutation::from_zero_based(items))) return;
    } else {
      visit(Permutation::from_zero_based(items));
    }
  } while (std::next_permutation(items.begin(), items.end()));
}

}  // namespace lbdiv
