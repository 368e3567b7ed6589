#pragma once

// Lovasz-Mallows densities. The base model p(x | theta, sigma) is an
// exponential family over scores in the unit cube; the extended model
// p(sigma | Theta, X) is a distribution over permutations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "lbdiv/aggregate.hpp"
#include "lbdiv/divergence.hpp"
#include "lbdiv/error.hpp"
#include "lbdiv/permutation.hpp"
#include "lbdiv/submodular.hpp"

namespace lbdiv {

struct LovaszMallows {
  SetFunction generator;
  Permutation reference;
  double concentration = 0.0;

  LovaszMallows(SetFunction f, Permutation sigma, double theta)
      : generator(std::move(f)), reference(std::move(sigma)), concentration(theta) {
    if (!(theta >= 0.0) || !std::isfinite(theta))
      throw DomainError("concentration must be finite and non-negative");
    detail::require_same_length("LovaszMallows: reference", generator.ground_size(),
                                reference.size());
  }
};

// -theta * d(x || sigma). x must lie in [0,1]^n.
inline double log_density_unnormalized(const LovaszMallows& model, std::span<const double> x) {
  detail::require_same_length("log_density_unnormalized", model.reference.size(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] >= 0.0 && x[i] <= 1.0))
      throw DomainError("score " + std::to_string(i + 1) + " outside the unit cube");
  if (model.concentration == 0.0) return 0.0;
  return -model.concentration * lb_divergence(model.generator, x, model.reference);
}

struct LogZEstimate {
  double estimate;
  double std_error;  // delta-method standard error of the log
};

inline constexpr std::size_t kMonteCarloChunk = 4096;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct ChunkMoments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

}  // namespace detail

// Monte-Carlo estimate of log Z(theta, sigma) = log of the integral of
// exp(-theta d(x || sigma)) over [0,1]^n (unit volume). Samples are drawn in
// fixed chunks seeded from (seed, chunk index), so the result does not
// depend on the number of worker threads.
inline LogZEstimate estimate_log_Z(const LovaszMallows& model, std::size_t samples,
                                   std::uint64_t seed, unsigned workers = 0) {
  if (samples < 100) throw DomainError("estimate_log_Z needs at least 100 samples");
  if (model.concentration == 0.0) return {0.0, 0.0};
  const std::size_t n = model.reference.size();
  const std::size_t chunks = (samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<detail::ChunkMoments> moments(chunks);

  auto run_chunk = [&](std::size_t c) {
    std::mt19937_64 rng(detail::splitmix64(seed ^ detail::splitmix64(c)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t begin = c * kMonteCarloChunk;
    const std::size_t end = std::min(samples, begin + kMonteCarloChunk);
    std::vector<double> x(n);
    detail::ChunkMoments m;
    for (std::size_t s = begin; s < end; ++s) {
      for (auto& v : x) v = unit(rng);
      const double w = std::exp(-model.concentration * lb_divergence(model.generator, x, model.reference));
      m.sum += w;
      m.sum_sq += w * w;
    }
    moments[c] = m;
  };

  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t c = t; c < chunks; c += workers) run_chunk(c);
      });
    for (auto& th : pool) th.join();
  }

  // Reduce in chunk order.
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& m : moments) {
    sum += m.sum;
    sum_sq += m.sum_sq;
  }
  const double count = static_cast<double>(samples);
  const double mean = sum / count;
  const double var = std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0));
  const double se_mean = std::sqrt(var / count);
  return {std::log(mean), se_mean / mean};
}

struct ExtendedLovaszMallows {
  SetFunction generator;
  ScoreMatrix scores;
  std::vector<double> concentrations;

  ExtendedLovaszMallows(SetFunction f, ScoreMatrix x, std::vector<double> thetas)
      : generator(std::move(f)), scores(std::move(x)), concentrations(std::move(thetas)) {
    detail::require_same_length("ExtendedLovaszMallows: generator", scores.cols(),
                                generator.ground_size());
    if (concentrations.size() != scores.rows())
      throw DimensionError("ExtendedLovaszMallows: concentrations", scores.rows(),
                           concentrations.size());
    for (double t : concentrations)
      if (!(t >= 0.0) || !std::isfinite(t))
        throw DomainError("concentrations must be finite and non-negative");
  }
};

inline constexpr std::size_t kMaxExactPermutationItems = 8;

// -sum_i theta_i d(x_i || sigma).
inline double extended_energy(const ExtendedLovaszMallows& model, const Permutation& sigma) {
  double e = 0.0;
  for (std::size_t r = 0; r < model.scores.rows(); ++r)
    if (model.concentrations[r] != 0.0)
      e -= model.concentrations[r] * lb_divergence(model.generator, model.scores.row(r), sigma);
  return e;
}

// log Z(Theta, X) by log-sum-exp over all n! permutations (n <= 8).
inline double extended_log_normalizer(const ExtendedLovaszMallows& model) {
  const std::size_t n = model.scores.cols();
  if (n > kMaxExactPermutationItems)
    throw LimitError("exact normalisation needs n <= 8, got " + std::to_string(n));
  std::vector<double> energies;
  for_each_permutation(n, [&](const Permutation& s) { energies.push_back(extended_energy(model, s)); });
  const double top = *std::max_element(energies.begin(), energies.end());
  double acc = 0.0;
  for (double e : energies) acc += std::exp(e - top);
  return top + std::log(acc);
}

struct ExtendedLogDensity {
  double value;
  bool normalized;  // false: value is the unnormalised energy (n > 8)
};

inline ExtendedLogDensity extended_log_density(const ExtendedLovaszMallows& model,
                                               const Permutation& sigma) {
  detail::require_same_length("extended_log_density", model.scores.cols(), sigma.size());
  const double energy = extended_energy(model, sigma);
  if (model.scores.cols() > kMaxExactPermutationItems) return {energy, false};
  return {energy - extended_log_normalizer(model), true};
}

// Same as above with a precomputed log normaliser.
inline double extended_log_density(const ExtendedLovaszMallows& model, const Permutation& sigma,
                                   double log_normalizer) {
  detail::require_same_length("extended_log_density", model.scores.cols(), sigma.size());
  return extended_energy(model, sigma) - log_normalizer;
}

// Mode of the extended model: the ordering of the theta-weighted mean row.
inline Permutation map_permutation(const ExtendedLovaszMallows& model,
                                   TieRule rule = TieRule::LowestIndexFirst) {
  double total = 0.0;
  std::vector<double> mu(model.scores.cols(), 0.0);
  for (std::size_t r = 0; r < model.scores.rows(); ++r) {
    const double t = model.concentrations[r];
    total += t;
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] += t * model.scores.row(r)[i];
  }
  if (total == 0.0) throw DomainError("map_permutation: all concentrations are zero");
  return induced_ordering(mu, rule);
}

}  // namespace lbdiv
