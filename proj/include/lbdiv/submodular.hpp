#pragma once

// Set functions over a ground set V = {1..n}: the concrete generators used to
// build Lovasz-Bregman divergences, plus exhaustive structural checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "lbdiv/error.hpp"
#include "lbdiv/permutation.hpp"

namespace lbdiv {

// Absolute tolerance of the structural checks.
inline constexpr double kStructureTolerance = 1e-9;
// Largest ground set accepted by exhaustive (2^n) routines.
inline constexpr std::size_t kMaxExhaustiveGroundSet = 20;

class Subset {
 public:
  explicit Subset(std::size_t n) : member_(n, 0) {}
  Subset(std::size_t n, std::initializer_list<std::size_t> items) : Subset(n) {
    for (auto i : items) insert(i);
  }
  Subset(std::size_t n, std::span<const std::size_t> items) : Subset(n) {
    for (auto i : items) insert(i);
  }

  static Subset full(std::size_t n) {
    Subset s(n);
    std::fill(s.member_.begin(), s.member_.end(), 1);
    s.count_ = n;
    return s;
  }
  // Bit i-1 of `mask` selects item i.
  static Subset from_mask(std::size_t n, std::uint64_t mask) {
    Subset s(n);
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1U) s.insert(i + 1);
    return s;
  }

  std::size_t ground_size() const { return member_.size(); }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  bool contains(std::size_t item) const { return member_[check(item)] != 0; }
  void insert(std::size_t item) {
    auto& m = member_[check(item)];
    if (!m) ++count_;
    m = 1;
  }
  void erase(std::size_t item) {
    auto& m = member_[check(item)];
    if (m) --count_;
    m = 0;
  }
  bool contains0(std::size_t i) const { return member_[i] != 0; }

  std::uint64_t mask() const {
    if (member_.size() > 64) throw LimitError("subset mask needs n <= 64");
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < member_.size(); ++i)
      if (member_[i]) m |= std::uint64_t{1} << i;
    return m;
  }

 private:
  std::size_t check(std::size_t item) const {
    if (item < 1 || item > member_.size())
      throw DomainError("item " + std::to_string(item) + " outside ground set 1.." +
                        std::to_string(member_.size()));
    return item - 1;
  }
  std::vector<char> member_;
  std::size_t count_ = 0;
};

// First differences delta_g(1..n) of a concave g with g(0) = 0. The table is
// non-increasing; g(k) is the prefix sum of the first k gains.
class GainTable {
 public:
  GainTable() = default;
  explicit GainTable(std::vector<double> gains) : gains_(std::move(gains)) {
    for (std::size_t i = 0; i < gains_.size(); ++i) {
      if (!std::isfinite(gains_[i])) throw DomainError("gain table entry is not finite");
      if (i && gains_[i] > gains_[i - 1] + 1e-12)
        throw DomainError("gain table must be non-increasing (entry " +
                          std::to_string(i + 1) + ")");
    }
    prefix_.assign(gains_.size() + 1, 0.0);
    for (std::size_t i = 0; i < gains_.size(); ++i) prefix_[i + 1] = prefix_[i] + gains_[i];
  }

  // g(k) = sqrt(k).
  static GainTable sqrt(std::size_t n) {
    std::vector<double> d(n);
    for (std::size_t i = 1; i <= n; ++i)
      d[i - 1] = std::sqrt(static_cast<double>(i)) - std::sqrt(static_cast<double>(i - 1));
    return GainTable(std::move(d));
  }
  // g(k) = log(1 + k).
  static GainTable log(std::size_t n) {
    std::vector<double> d(n);
    for (std::size_t i = 1; i <= n; ++i)
      d[i - 1] = std::log1p(static_cast<double>(i)) - std::log1p(static_cast<double>(i - 1));
    return GainTable(std::move(d));
  }
  static GainTable constant(std::size_t n, double value = 1.0) {
    return GainTable(std::vector<double>(n, value));
  }

  std::size_t size() const { return gains_.size(); }
  // delta_g(i), 1-based.
  double operator()(std::size_t i) const { return gains_.at(i - 1); }
  // g(k) for 0 <= k <= size().
  double cumulative(std::size_t k) const { return prefix_.at(k); }
  std::span<const double> gains() const { return gains_; }

 private:
  std::vector<double> gains_;
  std::vector<double> prefix_{0.0};
};

// Dense symmetric non-negative weights with zero diagonal.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(std::size_t n, std::vector<double> row_major)
      : n_(n), w_(std::move(row_major)) {
    if (w_.size() != n * n) throw DimensionError("weight matrix entries", n * n, w_.size());
  }
  static WeightMatrix uniform(std::size_t n, double value = 1.0) {
    std::vector<double> w(n * n, value);
    for (std::size_t i = 0; i < n; ++i) w[i * n + i] = 0.0;
    return WeightMatrix(n, std::move(w));
  }

  std::size_t size() const { return n_; }
  // 1-based access.
  double operator()(std::size_t i, std::size_t j) const { return w_.at((i - 1) * n_ + (j - 1)); }
  double at0(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
  std::span<const double> data() const { return w_; }

  // Throws DomainError naming the first violated condition.
  void validate() const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (at0(i, i) != 0.0)
        throw DomainError("weight matrix diagonal must be zero (item " + std::to_string(i + 1) + ")");
      for (std::size_t j = 0; j < n_; ++j) {
        const double a = at0(i, j), b = at0(j, i);
        if (!std::isfinite(a) || a < 0.0)
          throw DomainError("weight matrix entries must be finite and non-negative");
        if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}))
          throw DomainError("weight matrix is not symmetric at (" + std::to_string(i + 1) + "," +
                            std::to_string(j + 1) + ")");
      }
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> w_;
};

class SetFunction;

namespace generators {

// f(A) = g(|A|).
struct CardinalityConcave {
  GainTable gains;
};
// f(A) = min{g(|A|), g(m)}.
struct TruncatedCardinality {
  GainTable gains;
  std::size_t cutoff;
};
// f(A) = sum_{i in A, j not in A} W_ij.
struct GraphCut {
  WeightMatrix weights;
};
// f(A) = min{|A|, 1}.
struct MaxTruncation {};
// f(A) = I(1 <= |A| <= n-1).
struct RangeIndicator {};
// f(A) = I(A != {}, A != V).
struct ProperSubsetIndicator {};
// f(A) = values[mask(A)] - values[0].
struct ExplicitTable {
  std::vector<double> values;
};
// f(A) = sum_{i in A} w_i.
struct Modular {
  std::vector<double> weights;
};
struct Sum {
  std::vector<SetFunction> terms;
};

}  // namespace generators

using GeneratorDescriptor =
    std::variant<generators::CardinalityConcave, generators::TruncatedCardinality,
                 generators::GraphCut, generators::MaxTruncation, generators::RangeIndicator,
                 generators::ProperSubsetIndicator, generators::ExplicitTable,
                 generators::Modular, generators::Sum>;

namespace detail {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace detail

// A normalized set function f: 2^V -> R with f({}) = 0. Immutable.
class SetFunction {
 public:
  SetFunction(std::size_t n, GeneratorDescriptor descriptor)
      : n_(n), desc_(std::move(descriptor)) {
    if (n_ == 0) throw DomainError("ground set must contain at least one item");
    validate();
  }

  static SetFunction cardinality(GainTable gains) {
    const auto n = gains.size();
    return {n, generators::CardinalityConcave{std::move(gains)}};
  }
  static SetFunction cardinality_sqrt(std::size_t n) { return cardinality(GainTable::sqrt(n)); }
  static SetFunction truncated(GainTable gains, std::size_t cutoff) {
    const auto n = gains.size();
    return {n, generators::TruncatedCardinality{std::move(gains), cutoff}};
  }
  // min{|A|, m}.
  static SetFunction top_m(std::size_t n, std::size_t m) {
    return truncated(GainTable::constant(n), m);
  }
  static SetFunction graph_cut(WeightMatrix w) {
    const auto n = w.size();
    return {n, generators::GraphCut{std::move(w)}};
  }
  // |A| |V \ A|.
  static SetFunction uniform_cut(std::size_t n) { return graph_cut(WeightMatrix::uniform(n)); }
  static SetFunction max_truncation(std::size_t n) { return {n, generators::MaxTruncation{}}; }
  static SetFunction range_indicator(std::size_t n) { return {n, generators::RangeIndicator{}}; }
  static SetFunction proper_subset_indicator(std::size_t n) {
    return {n, generators::ProperSubsetIndicator{}};
  }
  // `values[mask]` for every mask < 2^n; shifted so the empty set maps to 0.
  static SetFunction explicit_table(std::size_t n, std::vector<double> values) {
    if (n > kMaxExhaustiveGroundSet) throw LimitError("explicit table needs n <= 20");
    if (values.size() != (std::size_t{1} << n))
      throw DimensionError("explicit table entries", std::size_t{1} << n, values.size());
    const double base = values[0];
    for (auto& v : values) v -= base;
    return {n, generators::ExplicitTable{std::move(values)}};
  }
  static SetFunction modular(std::vector<double> weights) {
    const auto n = weights.size();
    return {n, generators::Modular{std::move(weights)}};
  }
  static SetFunction sum(std::vector<SetFunction> terms) {
    if (terms.empty()) throw DomainError("sum of set functions needs at least one term");
    const auto n = terms.front().ground_size();
    return {n, generators::Sum{std::move(terms)}};
  }
  friend SetFunction operator+(const SetFunction& a, const SetFunction& b) {
    return sum({a, b});
  }

  std::size_t ground_size() const { return n_; }
  const GeneratorDescriptor& descriptor() const { return desc_; }

  // True when f(A) depends on |A| only.
  bool is_cardinality_based() const {
    return std::visit(
        detail::overloaded{
            [](const generators::CardinalityConcave&) { return true; },
            [](const generators::TruncatedCardinality&) { return true; },
            [](const generators::MaxTruncation&) { return true; },
            [](const generators::RangeIndicator&) { return true; },
            [](const generators::ProperSubsetIndicator&) { return true; },
            [](const generators::GraphCut& g) {
              const auto n = g.weights.size();
              if (n < 2) return true;
              for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                  if (i != j && g.weights.at0(i, j) != g.weights.at0(0, 1)) return false;
              return true;
            },
            [](const generators::Sum& s) {
              return std::all_of(s.terms.begin(), s.terms.end(),
                                 [](const SetFunction& t) { return t.is_cardinality_based(); });
            },
            [](const auto&) { return false; }},
        desc_);
  }

  double evaluate(const Subset& a) const {
    if (a.ground_size() != n_) throw DimensionError("evaluate: subset ground set", n_, a.ground_size());
    const std::size_t k = a.size();
    return std::visit(
        detail::overloaded{
            [&](const generators::CardinalityConcave& g) { return g.gains.cumulative(k); },
            [&](const generators::TruncatedCardinality& g) {
              return std::min(g.gains.cumulative(k), g.gains.cumulative(g.cutoff));
            },
            [&](const generators::GraphCut& g) {
              double total = 0.0;
              for (std::size_t i = 0; i < n_; ++i) {
                if (!a.contains0(i)) continue;
                for (std::size_t j = 0; j < n_; ++j)
                  if (!a.contains0(j)) total += g.weights.at0(i, j);
              }
              return total;
            },
            [&](const generators::MaxTruncation&) { return k ? 1.0 : 0.0; },
            [&](const generators::RangeIndicator&) { return k >= 1 && k + 1 <= n_ ? 1.0 : 0.0; },
            [&](const generators::ProperSubsetIndicator&) { return k != 0 && k != n_ ? 1.0 : 0.0; },
            [&](const generators::ExplicitTable& t) { return t.values[a.mask()]; },
            [&](const generators::Modular& m) {
              double total = 0.0;
              for (std::size_t i = 0; i < n_; ++i)
                if (a.contains0(i)) total += m.weights[i];
              return total;
            },
            [&](const generators::Sum& s) {
              double total = 0.0;
              for (const auto& t : s.terms) total += t.evaluate(a);
              return total;
            }},
        desc_);
  }

  // f(A + j) - f(A); j must not be in A.
  double marginal_gain(std::size_t j, const Subset& a) const {
    if (a.contains(j))
      throw DomainError("marginal_gain: item " + std::to_string(j) + " already in the set");
    Subset b = a;
    b.insert(j);
    return evaluate(b) - evaluate(a);
  }

  // Greedy marginal gains along the chain of prefixes of sigma, indexed by
  // 0-based item: h[sigma(j)] = f(S_j) - f(S_{j-1}).
  std::vector<double> chain_gains(const Permutation& sigma) const {
    if (sigma.size() != n_) throw DimensionError("chain_gains: permutation", n_, sigma.size());
    const auto order = sigma.items0();
    std::vector<double> h(n_, 0.0);
    std::visit(
        detail::overloaded{
            [&](const generators::CardinalityConcave& g) {
              for (std::size_t r = 0; r < n_; ++r) h[order[r]] = g.gains.gains()[r];
            },
            [&](const generators::TruncatedCardinality& g) {
              const double cap = g.gains.cumulative(g.cutoff);
              double prev = 0.0;
              for (std::size_t r = 0; r < n_; ++r) {
                const double cur = std::min(g.gains.cumulative(r + 1), cap);
                h[order[r]] = cur - prev;
                prev = cur;
              }
            },
            [&](const generators::GraphCut& g) {
              // Adding j to S gains its weight to the outside and loses its
              // weight to S.
              std::vector<char> in(n_, 0);
              for (std::size_t r = 0; r < n_; ++r) {
                const std::size_t j = order[r];
                double gain = 0.0;
                for (std::size_t k = 0; k < n_; ++k) {
                  if (k == j) continue;
                  gain += in[k] ? -g.weights.at0(j, k) : g.weights.at0(j, k);
                }
                h[j] = gain;
                in[j] = 1;
              }
            },
            [&](const generators::MaxTruncation&) { h[order[0]] = 1.0; },
            [&](const generators::RangeIndicator&) { proper_subset_gains(order, h); },
            [&](const generators::ProperSubsetIndicator&) { proper_subset_gains(order, h); },
            [&](const generators::ExplicitTable& t) {
              std::uint64_t mask = 0;
              for (std::size_t r = 0; r < n_; ++r) {
                const std::uint64_t next = mask | std::uint64_t{1} << order[r];
                h[order[r]] = t.values[next] - t.values[mask];
                mask = next;
              }
            },
            [&](const generators::Modular& m) { h = m.weights; },
            [&](const generators::Sum& s) {
              for (const auto& t : s.terms) {
                const auto part = t.chain_gains(sigma);
                for (std::size_t i = 0; i < n_; ++i) h[i] += part[i];
              }
            }},
        desc_);
    return h;
  }

  std::string name() const {
    return std::visit(
        detail::overloaded{
            [](const generators::CardinalityConcave&) { return std::string("cardinality"); },
            [](const generators::TruncatedCardinality& g) {
              return "truncated_cardinality(m=" + std::to_string(g.cutoff) + ")";
            },
            [](const generators::GraphCut&) { return std::string("graph_cut"); },
            [](const generators::MaxTruncation&) { return std::string("max_truncation"); },
            [](const generators::RangeIndicator&) { return std::string("range_indicator"); },
            [](const generators::ProperSubsetIndicator&) {
              return std::string("proper_subset_indicator");
            },
            [](const generators::ExplicitTable&) { return std::string("explicit_table"); },
            [](const generators::Modular&) { return std::string("modular"); },
            [](const generators::Sum& s) {
              std::string out = "sum(";
              for (std::size_t i = 0; i < s.terms.size(); ++i) {
                if (i) out += "+";
                out += s.terms[i].name();
              }
              return out + ")";
            }},
        desc_);
  }

 private:
  void proper_subset_gains(std::span<const std::size_t> order, std::vector<double>& h) const {
    if (n_ < 2) return;
    h[order.front()] = 1.0;
    h[order.back()] = -1.0;
  }

  void validate() const {
    std::visit(detail::overloaded{
                   [&](const generators::CardinalityConcave& g) {
                     if (g.gains.size() != n_)
                       throw DimensionError("gain table", n_, g.gains.size());
                   },
                   [&](const generators::TruncatedCardinality& g) {
                     if (g.gains.size() != n_)
                       throw DimensionError("gain table", n_, g.gains.size());
                     if (g.cutoff < 1 || g.cutoff > n_)
                       throw DomainError("cutoff m must satisfy 1 <= m <= n");
                     for (std::size_t i = 1; i <= g.cutoff; ++i)
                       if (g.gains(i) < 0.0)
                         throw DomainError("truncated cardinality needs non-negative gains up to m");
                   },
                   [&](const generators::GraphCut& g) {
                     if (g.weights.size() != n_)
                       throw DimensionError("weight matrix", n_, g.weights.size());
                     g.weights.validate();
                   },
                   [&](const generators::ExplicitTable& t) {
                     if (n_ > kMaxExhaustiveGroundSet)
                       throw LimitError("explicit table needs n <= 20");
                     if (t.values.size() != (std::size_t{1} << n_))
                       throw DimensionError("explicit table entries", std::size_t{1} << n_,
                                            t.values.size());
                     if (t.values[0] != 0.0) throw DomainError("explicit table must map {} to 0");
                   },
                   [&](const generators::Modular& m) {
                     if (m.weights.size() != n_)
                       throw DimensionError("modular weights", n_, m.weights.size());
                   },
                   [&](const generators::Sum& s) {
                     for (const auto& t : s.terms)
                       if (t.ground_size() != n_)
                         throw DimensionError("sum term ground set", n_, t.ground_size());
                   },
                   [](const auto&) {}},
               desc_);
  }

  std::size_t n_;
  GeneratorDescriptor desc_;
};

inline double evaluate(const SetFunction& f, const Subset& a) { return f.evaluate(a); }

inline double marginal_gain(const SetFunction& f, std::size_t j, const Subset& a) {
  return f.marginal_gain(j, a);
}

// All 2^n values, indexed by bitmask (bit i-1 selects item i).
inline std::vector<double> tabulate(const SetFunction& f) {
  const std::size_t n = f.ground_size();
  if (n > kMaxExhaustiveGroundSet)
    throw LimitError("exhaustive check needs n <= 20, got " + std::to_string(n));
  std::vector<double> table(std::size_t{1} << n);
  for (std::uint64_t mask = 0; mask < table.size(); ++mask)
    table[mask] = f.evaluate(Subset::from_mask(n, mask));
  return table;
}

// Exhaustive check of f(S) + f(T) >= f(S u T) + f(S n T), through the
// equivalent local form f(S+i) + f(S+j) >= f(S+i+j) + f(S).
inline bool is_submodular(const SetFunction& f, double tol = kStructureTolerance) {
  const auto table = tabulate(f);
  const std::size_t n = f.ground_size();
  for (std::uint64_t s = 0; s < table.size(); ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t bi = std::uint64_t{1} << i;
      if (s & bi) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::uint64_t bj = std::uint64_t{1} << j;
        if (s & bj) continue;
        if (table[s | bi] + table[s | bj] < table[s | bi | bj] + table[s] - tol) return false;
      }
    }
  }
  return true;
}

inline bool is_monotone(const SetFunction& f, double tol = kStructureTolerance) {
  const auto table = tabulate(f);
  const std::size_t n = f.ground_size();
  for (std::uint64_t s = 0; s < table.size(); ++s)
    for (std::size_t i = 0; i < n; ++i)
      if (!(s >> i & 1U) && table[s | std::uint64_t{1} << i] < table[s] - tol) return false;
  return true;
}

}  // namespace lbdiv
