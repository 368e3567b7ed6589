#pragma once

// Rank aggregation under the LB divergence: the mean-ordering closed form,
// its brute-force oracle, weighted feature inference and LB k-means.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lbdiv/divergence.hpp"
#include "lbdiv/error.hpp"
#include "lbdiv/permutation.hpp"
#include "lbdiv/submodular.hpp"

namespace lbdiv {

// Score vectors over a shared item set; every row has length n.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  explicit ScoreMatrix(std::vector<std::vector<double>> rows,
                       std::vector<std::string> row_ids = {})
      : rows_(std::move(rows)), ids_(std::move(row_ids)) {
    if (rows_.empty()) throw DomainError("score matrix needs at least one row");
    const std::size_t n = rows_.front().size();
    if (n == 0) throw DomainError("score rows must be non-empty");
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (rows_[r].size() != n)
        throw DimensionError("score matrix row " + std::to_string(r + 1), n, rows_[r].size());
      for (double v : rows_[r])
        if (!std::isfinite(v))
          throw DomainError("score matrix row " + std::to_string(r + 1) + " has a non-finite entry");
    }
    if (!ids_.empty() && ids_.size() != rows_.size())
      throw DimensionError("score matrix row ids", rows_.size(), ids_.size());
  }

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return rows_.front().size(); }
  std::span<const double> row(std::size_t r) const { return rows_.at(r); }
  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) out[r] = rows_[r].at(c);
    return out;
  }
  const std::vector<std::vector<double>>& data() const { return rows_; }
  const std::vector<std::string>& row_ids() const { return ids_; }

 private:
  std::vector<std::vector<double>> rows_;
  std::vector<std::string> ids_;
};

struct MeanOrdering {
  Permutation ordering;
  std::vector<double> mean;
};

namespace detail {

inline std::vector<double> checked_weights(const ScoreMatrix& x,
                                           const std::optional<std::vector<double>>& weights) {
  if (!weights) return std::vector<double>(x.rows(), 1.0);
  if (weights->size() != x.rows()) throw DimensionError("row weights", x.rows(), weights->size());
  for (double w : *weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("row weights must be positive");
  return *weights;
}

inline std::vector<double> weighted_mean(const ScoreMatrix& x, std::span<const double> w) {
  std::vector<double> mu(x.cols(), 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    total += w[r];
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] += w[r] * x.row(r)[i];
  }
  for (auto& v : mu) v /= total;
  return mu;
}

}  // namespace detail

// Closed-form minimiser of sum_i w_i d_f(x_i || sigma): the ordering of the
// weighted mean. The minimiser does not depend on f.
inline MeanOrdering mean_ordering(const ScoreMatrix& x, const SetFunction& f,
                                  const std::optional<std::vector<double>>& weights = std::nullopt,
                                  TieRule rule = TieRule::LowestIndexFirst) {
  detail::require_same_length("mean_ordering: generator", x.cols(), f.ground_size());
  const auto w = detail::checked_weights(x, weights);
  auto mu = detail::weighted_mean(x, w);
  auto sigma = induced_ordering(mu, rule);
  return {std::move(sigma), std::move(mu)};
}

inline double aggregation_objective(const ScoreMatrix& x, const SetFunction& f,
                                    const Permutation& sigma,
                                    const std::optional<std::vector<double>>& weights = std::nullopt) {
  detail::require_same_length("aggregation_objective: generator", x.cols(), f.ground_size());
  detail::require_same_length("aggregation_objective: permutation", x.cols(), sigma.size());
  const auto w = detail::checked_weights(x, weights);
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) total += w[r] * lb_divergence(f, x.row(r), sigma);
  return total;
}

inline constexpr std::size_t kMaxBruteForceItems = 8;

// Exhaustive argmin of the aggregation objective over all n! orderings.
// Values within 1e-12 (relative) of the running best count as ties and the
// lexicographically first permutation wins.
inline Permutation brute_force_mean(const ScoreMatrix& x, const SetFunction& f,
                                    const std::optional<std::vector<double>>& weights = std::nullopt) {
  if (x.cols() > kMaxBruteForceItems)
    throw LimitError("brute_force_mean needs n <= 8, got " + std::to_string(x.cols()));
  std::optional<Permutation> best;
  double best_value = std::numeric_limits<double>::infinity();
  for_each_permutation(x.cols(), [&](const Permutation& sigma) {
    const double v = aggregation_objective(x, f, sigma, weights);
    if (!best || v < best_value - 1e-12 * std::max(1.0, std::abs(best_value))) {
      best_value = v;
      best = sigma;
    }
  });
  return *best;
}

// Sum of absolute consecutive differences of the sorted vector.
inline double total_variation(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) tv += s[i + 1] - s[i];
  return tv;
}

// Inference for phi(X, sigma) = sum_j w_j d(x^j || sigma). Rows of
// `features` are documents, columns are features, so column j is x^j; the
// result orders the documents by w^T x_i.
inline Permutation feature_inference(const ScoreMatrix& features, std::span<const double> w,
                                     TieRule rule = TieRule::LowestIndexFirst) {
  detail::require_same_length("feature_inference: weights", features.cols(), w.size());
  std::vector<double> score(features.rows(), 0.0);
  for (std::size_t i = 0; i < features.rows(); ++i) score[i] = dot(features.row(i), w);
  return induced_ordering(score, rule);
}

struct SampleRows {};
struct ProvidedInit {
  std::vector<Permutation> representatives;
};
using KMeansInit = std::variant<SampleRows, ProvidedInit>;

struct KMeansOptions {
  std::size_t k = 2;
  KMeansInit init = SampleRows{};
  std::size_t max_iter = 100;
  double tol = 1e-9;
  std::uint64_t seed = 0x5eed;
};

struct ClusteringResult {
  std::vector<std::size_t> assignments;  // 0-based cluster per row
  std::vector<Permutation> representatives;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;  // after each iteration
};

inline double clustering_objective(const ScoreMatrix& x, const SetFunction& f,
                                   std::span<const std::size_t> assignments,
                                   std::span<const Permutation> reps) {
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r)
    total += lb_divergence(f, x.row(r), reps[assignments[r]]);
  return total;
}

namespace detail {

inline std::vector<Permutation> sample_row_orderings(const ScoreMatrix& x, std::size_t k,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pool(x.rows());
  for (std::size_t r = 0; r < pool.size(); ++r) pool[r] = r;
  std::shuffle(pool.begin(), pool.end(), rng);
  // Prefer rows whose orderings are new; after n redraws accept duplicates.
  std::vector<Permutation> reps;
  std::size_t next = 0, redraws = 0;
  while (reps.size() < k) {
    const auto sigma = induced_ordering(x.row(pool[next]));
    const bool fresh = std::find(reps.begin(), reps.end(), sigma) == reps.end();
    const std::size_t remaining = pool.size() - next;
    if (fresh || redraws >= x.cols() || remaining <= k - reps.size()) {
      reps.push_back(sigma);
    } else {
      ++redraws;
    }
    ++next;
  }
  return reps;
}

}  // namespace detail

// k-means with permutations as representatives: assign each row to its
// nearest representative, then replace each representative by the ordering
// of its cluster mean. The objective never increases.
inline ClusteringResult lb_kmeans(const ScoreMatrix& x, const SetFunction& f,
                                  const KMeansOptions& opts = {}) {
  detail::require_same_length("lb_kmeans: generator", x.cols(), f.ground_size());
  if (opts.k < 1) throw DomainError("lb_kmeans: k must be at least 1");
  if (opts.k > x.rows())
    throw DomainError("lb_kmeans: k=" + std::to_string(opts.k) + " exceeds " +
                      std::to_string(x.rows()) + " rows");
  if (opts.max_iter < 1) throw DomainError("lb_kmeans: max_iter must be at least 1");
  if (!(opts.tol >= 0.0)) throw DomainError("lb_kmeans: tol must be non-negative");

  ClusteringResult res;
  if (const auto* provided = std::get_if<ProvidedInit>(&opts.init)) {
    if (provided->representatives.size() != opts.k)
      throw DimensionError("lb_kmeans: provided representatives", opts.k,
                           provided->representatives.size());
    for (const auto& p : provided->representatives)
      detail::require_same_length("lb_kmeans: provided representative", x.cols(), p.size());
    res.representatives = provided->representatives;
  } else {
    res.representatives = detail::sample_row_orderings(x, opts.k, opts.seed);
  }

  const std::size_t rows = x.rows();
  std::vector<double> dist(rows, 0.0);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 1; iter <= opts.max_iter; ++iter) {
    // Assignment: nearest representative, lowest index on ties.
    std::vector<std::size_t> assign(rows, 0);
    for (std::size_t r = 0; r < rows; ++r) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < opts.k; ++c) {
        const double d = lb_divergence(f, x.row(r), res.representatives[c]);
        if (d < best) {
          best = d;
          assign[r] = c;
        }
      }
      dist[r] = best;
    }

    // Reseed empty clusters with the row farthest from its representative.
    std::vector<std::size_t> sizes(opts.k, 0);
    for (auto c : assign) ++sizes[c];
    for (std::size_t c = 0; c < opts.k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = rows;
      for (std::size_t r = 0; r < rows; ++r)
        if (sizes[assign[r]] > 1 && (far == rows || dist[r] > dist[far])) far = r;
      if (far == rows) break;
      --sizes[assign[far]];
      assign[far] = c;
      sizes[c] = 1;
      dist[far] = 0.0;
    }

    // Update: ordering of each cluster mean.
    for (std::size_t c = 0; c < opts.k; ++c) {
      std::vector<double> mu(x.cols(), 0.0);
      std::size_t count = 0;
      for (std::size_t r = 0; r < rows; ++r) {
        if (assign[r] != c) continue;
        ++count;
        for (std::size_t i = 0; i < mu.size(); ++i) mu[i] += x.row(r)[i];
      }
      if (count == 0) continue;
      res.representatives[c] = induced_ordering(mu);
    }

    const bool unchanged = iter > 1 && assign == res.assignments;
    res.assignments = std::move(assign);
    res.objective = clustering_objective(x, f, res.assignments, res.representatives);
    res.objective_history.push_back(res.objective);
    res.iterations = iter;
    if (previous - res.objective < opts.tol || unchanged) {
      res.converged = true;
      break;
    }
    previous = res.objective;
  }
  return res;
}

}  // namespace lbdiv
