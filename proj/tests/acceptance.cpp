// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>

#include "lbdiv/lbdiv.hpp"
#include "support/oracles.hpp"

namespace {

using namespace lbdiv;
using testing::Rng;

// Pinned tolerances and budgets.
constexpr double kMeanTol = 1e-12;            // criterion 1
constexpr double kBudget1 = 1.0;              // seconds
constexpr double kBudget2 = 30.0;
constexpr double kRelTol3 = 1e-12;            // vertex tightness, greedy consistency
constexpr double kAbsTol4 = 1e-12;            // identities in the property suite
constexpr double kConvexSlack4 = 1e-9;
constexpr double kZeroThreshold4 = 1e-12;     // "d > 0" in zero-iff-consistent
constexpr double kBudget4 = 60.0;
constexpr double kNdcgTol5 = 1e-12;
constexpr double kCutTol5 = 1e-12;
constexpr double kUlpSlack56 = 1e-12;         // float slack around the integer identities
constexpr double kSumTol8 = 1e-9;
constexpr double kSigmas8 = 3.0;
constexpr std::size_t kSamples8 = 100000;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ScoreMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t n) {
  std::vector<std::vector<double>> x(rows);
  for (auto& r : x) r = testing::random_vector(rng, n);
  return ScoreMatrix(std::move(x));
}

bool min_gap_at_least(std::span<const double> v, double gap) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i + 1] - s[i] < gap) return false;
  return true;
}

Outcome criterion1() {
  const ScoreMatrix x({{1.9, 2.0}, {1.8, 2.0}, {1.95, 2.0}, {2.0, 1.0}, {2.5, 1.2}});
  Outcome o;
  for (const auto& f : {SetFunction::cardinality_sqrt(2), SetFunction::uniform_cut(2)}) {
    const auto m = mean_ordering(x, f);
    o.pass = o.pass && std::abs(m.mean[0] - 2.03) <= kMeanTol && std::abs(m.mean[1] - 1.64) <= kMeanTol &&
             m.ordering(1) == 1 && brute_force_mean(x, f)(1) == 1;
    o.detail = "mean=(" + fmt("%.12g", m.mean[0]) + "," + fmt("%.12g", m.mean[1]) + ") ordering=" +
               m.ordering.to_string();
  }
  return o;
}

Outcome criterion2() {
  Rng rng(2002);
  std::size_t instances = 0, mismatches = 0;
  while (instances < 200) {
    const std::size_t n = 2 + instances % 5, rows = 1 + (instances * 7) % 10;
    const auto x = random_matrix(rng, rows, n);
    // Untied instances: the mean must have a unique ordering.
    if (!min_gap_at_least(mean_ordering(x, SetFunction::uniform_cut(n)).mean, 1e-6)) continue;
    ++instances;
    // top-m with strictly decreasing gains and m = n-1 has a unique minimiser.
    const SetFunction fs[] = {SetFunction::cardinality_sqrt(n), SetFunction::uniform_cut(n),
                              SetFunction::truncated(GainTable::sqrt(n), n - 1)};
    for (const auto& f : fs)
      if (!(mean_ordering(x, f).ordering == brute_force_mean(x, f))) ++mismatches;
  }
  return {mismatches == 0, std::to_string(instances) + " instances x 3 generators, " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome criterion3() {
  Rng rng(3003);
  double worst_vertex = 0.0, worst_greedy = 0.0;
  const auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  for (std::size_t n = 1; n <= 10; ++n) {
    const SetFunction fs[] = {SetFunction::cardinality_sqrt(n), SetFunction::uniform_cut(n),
                              SetFunction::graph_cut(testing::random_weights(rng, n)),
                              SetFunction::top_m(n, (n + 1) / 2),
                              SetFunction::cardinality(testing::random_gain_table(rng, n, false, true))};
    for (const auto& f : fs)
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        const auto a = Subset::from_mask(n, mask);
        std::vector<double> ind(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) ind[i] = a.contains0(i) ? 1.0 : 0.0;
        worst_vertex = std::max(worst_vertex, rel(lovasz_extension(f, ind), f.evaluate(a)));
      }
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const auto f = trial % 2 ? SetFunction::cardinality_sqrt(n) : SetFunction::graph_cut(testing::random_weights(rng, n));
    const auto x = testing::random_vector(rng, n, -1.0, 1.0);
    const double fx = lovasz_extension(f, x);
    const double greedy = dot(extreme_subgradient(f, induced_ordering(x)).values, x);
    worst_greedy = std::max({worst_greedy, rel(fx, greedy), rel(fx, testing::oracle_lovasz_chain(f, x))});
  }
  return {worst_vertex <= kRelTol3 && worst_greedy <= kRelTol3,
          "max rel err vertex=" + fmt("%.3g", worst_vertex) + " greedy=" + fmt("%.3g", worst_greedy)};
}

Outcome criterion4() {
  Rng rng(4004);
  std::vector<std::string> failed;
  const auto check = [&](bool ok, const char* name) {
    if (!ok && std::find(failed.begin(), failed.end(), name) == failed.end()) failed.emplace_back(name);
  };
  const auto family = [&](std::size_t n) {
    return std::vector<SetFunction>{
        SetFunction::cardinality_sqrt(n), SetFunction::cardinality(testing::random_gain_table(rng, n, false, true)),
        SetFunction::top_m(n, 1 + (n - 1) / 2), SetFunction::uniform_cut(n),
        SetFunction::graph_cut(testing::random_weights(rng, n)), SetFunction::max_truncation(n),
        SetFunction::range_indicator(n)};
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const auto fs = family(n);
    const auto x = testing::random_vector(rng, n), y = testing::random_vector(rng, n);
    const auto s1 = testing::random_permutation(rng, n), s2 = testing::random_permutation(rng, n);
    const auto tau = testing::random_permutation(rng, n);
    const double lam = unit(rng);
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = lam * x[i] + (1 - lam) * y[i];
    const auto mod = SetFunction::modular(testing::random_vector(rng, n, -2, 2));
    for (std::size_t k = 0; k < fs.size(); ++k) {
      const auto& f = fs[k];
      const auto& g = fs[(k + 3) % fs.size()];
      const double d = lb_divergence(f, x, s1);
      check(d >= 0.0, "nonnegativity");
      check(lb_divergence(f, z, s1) <= lam * d + (1 - lam) * lb_divergence(f, y, s1) + kConvexSlack4, "convexity");
      check(testing::near_rel(lb_divergence(f + g, x, s1), d + lb_divergence(g, x, s1), kAbsTol4), "linearity");
      check(std::abs(lb_divergence(f + mod, x, s1) - d) <= kAbsTol4, "modular invariance");
      const auto h1 = f.chain_gains(s1), h2 = f.chain_gains(s2);
      double lin = 0.0;
      for (std::size_t i = 0; i < n; ++i) lin += x[i] * (h2[i] - h1[i]);
      check(std::abs(d - lb_divergence(f, x, s2) - lin) <= kAbsTol4, "linear separation");
      check(d <= confidence_bound(f, x) + kAbsTol4, "confidence bound");
      if (f.is_cardinality_based())
        check(std::abs(d - lb_divergence(f, relabel_scores(tau, x), compose(tau, s1))) <= kAbsTol4,
              "relabeling invariance");
    }
  }
  // Zero iff consistent: strictly decreasing gains and positive-weight cuts, untied x.
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const auto x = testing::random_untied_vector(rng, n, 1e-3);
    const auto sx = induced_ordering(x);
    const SetFunction fs[] = {SetFunction::cardinality(testing::random_gain_table(rng, n, true)),
                              SetFunction::graph_cut(testing::random_weights(rng, n, 0.1, 1.0))};
    for (const auto& f : fs)
      for_each_permutation(n, [&](const Permutation& s) {
        check((lb_divergence(f, x, s) > kZeroThreshold4) == !(s == sx), "zero iff consistent");
      });
  }
  // Priority: with equal gaps, swapping ranks k and k+1 costs less as k grows.
  for (std::size_t n = 3; n <= 8; ++n) {
    const auto f = SetFunction::cardinality_sqrt(n);
    const auto order = testing::random_permutation(rng, n);
    std::vector<double> x(n);
    for (std::size_t r = 1; r <= n; ++r) x[order(r) - 1] = 1.0 - 0.1 * static_cast<double>(r);
    double previous = INFINITY;
    for (std::size_t k = 1; k < n; ++k) {
      auto items = order.one_based();
      std::swap(items[k - 1], items[k]);
      const double d = lb_divergence(f, x, Permutation(items));
      check(d < previous, "priority");
      previous = d;
    }
  }
  std::string detail = "9 properties, n<=8";
  for (const auto& name : failed) detail += "; FAILED " + name;
  return {failed.empty(), detail};
}

Outcome criterion5() {
  Rng rng(5005);
  double worst_ndcg = 0.0, worst_cut = 0.0, worst_auc = 0.0;
  bool counts_match = true;
  std::size_t bitwise = 0;
  std::uniform_int_distribution<int> grade(0, 4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 7, k = 1 + trial % n;
    std::vector<double> r(n);
    for (auto& v : r) v = grade(rng);
    r[trial % n] = std::max(r[trial % n], 1.0);
    const auto sigma = testing::random_permutation(rng, n);
    const auto d = DiscountProfile::log2(k);
    const auto t = ndcg_terms(r, sigma, d);
    worst_ndcg = std::max(worst_ndcg, std::abs((t.ideal_dcg - t.dcg) - lb_top_m(d.as_gains(), k, r, sigma)));

    // AUC against the one-orientation cut with W = 1/(|G||B|) between classes.
    std::vector<std::size_t> good, bad;
    std::vector<double> ind(n, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
      if (i == 1 || (i != 2 && rng() % 2)) {
        good.push_back(i);
        ind[i - 1] = 1.0;
      } else {
        bad.push_back(i);
      }
    }
    const double pairs = static_cast<double>(good.size() * bad.size());
    std::vector<double> w(n * n, 0.0);
    for (auto a : good)
      for (auto b : bad) w[(a - 1) * n + (b - 1)] = w[(b - 1) * n + (a - 1)] = 1.0 / pairs;
    const double auc = auc_loss(good, bad, sigma);
    const double cut = lb_cut(WeightMatrix(n, w), ind, sigma, 1);
    worst_auc = std::max(worst_auc, std::abs(auc - cut));
    counts_match = counts_match && std::llround(auc * pairs) == std::llround(cut * pairs);
    bitwise += auc == cut;

    const auto x = testing::random_vector(rng, n);
    const auto wr = testing::random_weights(rng, n);
    worst_cut = std::max(worst_cut, std::abs(lb_cut(wr, x, sigma, 2) -
                                             lb_divergence(SetFunction::graph_cut(wr), x, sigma)));
  }
  const bool ok = worst_ndcg <= kNdcgTol5 && worst_cut <= kCutTol5 && counts_match && worst_auc <= kUlpSlack56;
  return {ok, "ndcg err=" + fmt("%.3g", worst_ndcg) + " cut err=" + fmt("%.3g", worst_cut) +
                  " auc: pair counts " + (counts_match ? "equal" : "DIFFER") + ", bitwise " +
                  std::to_string(bitwise) + "/100, max float gap=" + fmt("%.3g", worst_auc)};
}

Outcome criterion6() {
  Rng rng(6006);
  bool integer_match = true;
  double worst = 0.0;
  std::size_t bitwise = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 7;
    const auto x = testing::random_untied_vector(rng, n, 1e-3);
    const auto sigma = testing::random_permutation(rng, n);
    std::vector<double> w(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) w[i * n + j] = 1.0 / std::abs(x[i] - x[j]);
    const double d = lb_cut(WeightMatrix(n, w), x, sigma, 1);
    const auto tau = kendall_tau(induced_ordering(x), sigma);
    integer_match = integer_match && std::llround(d) == static_cast<long long>(tau);
    worst = std::max(worst, std::abs(d - static_cast<double>(tau)));
    bitwise += d == static_cast<double>(tau);
  }
  return {integer_match && worst <= kUlpSlack56,
          std::string("integer match ") + (integer_match ? "on all 100" : "FAILED") + ", bitwise " +
              std::to_string(bitwise) + "/100, max float gap=" + fmt("%.3g", worst)};
}

Outcome criterion7() {
  Rng rng(7007);
  bool monotone = true;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const auto x = random_matrix(rng, 6 + trial % 25, n);
    const auto f = trial % 2 ? SetFunction::cardinality_sqrt(n) : SetFunction::uniform_cut(n);
    const auto res = lb_kmeans(x, f, {.k = static_cast<std::size_t>(1 + trial % 4), .seed = static_cast<std::uint64_t>(trial)});
    for (std::size_t i = 1; i < res.objective_history.size(); ++i)
      monotone = monotone && res.objective_history[i] <= res.objective_history[i - 1] + 1e-12;
  }
  // Two populations: orderings (1,2) and (2,1), 20 rows each, gaps >= 0.5.
  std::uniform_real_distribution<double> lo(0.0, 0.25), hi(0.75, 1.0);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 20; ++i) rows.push_back({hi(rng), lo(rng)});
  for (int i = 0; i < 20; ++i) rows.push_back({lo(rng), hi(rng)});
  const auto res = lb_kmeans(ScoreMatrix(rows), SetFunction::uniform_cut(2), {.k = 2});
  bool separated = res.assignments[0] != res.assignments[20];
  for (std::size_t r = 0; r < 40; ++r) separated = separated && res.assignments[r] == res.assignments[r < 20 ? 0 : 20];
  return {monotone && separated, std::string("monotone on 50: ") + (monotone ? "yes" : "NO") +
                                     ", two populations separated: " + (separated ? "yes" : "NO")};
}

Outcome criterion8() {
  Rng rng(8008);
  double worst_sum = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 6, rows = 1 + trial % 4;
    const SetFunction f = trial % 2 ? SetFunction::cardinality_sqrt(n) : SetFunction::graph_cut(testing::random_weights(rng, n));
    const ExtendedLovaszMallows m(f, random_matrix(rng, rows, n), testing::random_vector(rng, rows, 0.0, 5.0));
    const double log_z = extended_log_normalizer(m);
    double total = 0.0;
    for_each_permutation(n, [&](const Permutation& s) { total += std::exp(extended_log_density(m, s, log_z)); });
    worst_sum = std::max(worst_sum, std::abs(total - 1.0));
  }
  std::size_t map_mismatch = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 5, rows = 1 + trial % 5;
    const auto f = trial % 2 ? SetFunction::cardinality_sqrt(n) : SetFunction::uniform_cut(n);
    const ExtendedLovaszMallows m(f, random_matrix(rng, rows, n), testing::random_vector(rng, rows, 0.1, 5.0));
    std::optional<Permutation> best;
    double best_energy = -INFINITY;
    for_each_permutation(n, [&](const Permutation& s) {
      const double e = extended_energy(m, s);
      if (e > best_energy) {
        best_energy = e;
        best = s;
      }
    });
    if (!(map_permutation(m) == *best)) ++map_mismatch;
  }
  double worst_z = 0.0;
  bool z_ok = true;
  std::uint64_t seed = 1;
  for (const auto& f : {SetFunction::cardinality_sqrt(3), SetFunction::cardinality_sqrt(5),
                        SetFunction::uniform_cut(4), SetFunction::cardinality(GainTable::log(6))}) {
    const std::size_t n = f.ground_size();
    const auto a = estimate_log_Z(LovaszMallows(f, testing::random_permutation(rng, n), 2.0), kSamples8, seed++);
    const auto b = estimate_log_Z(LovaszMallows(f, testing::random_permutation(rng, n), 2.0), kSamples8, seed++);
    const double z = std::abs(a.estimate - b.estimate) / std::hypot(a.std_error, b.std_error);
    worst_z = std::max(worst_z, z);
    z_ok = z_ok && z <= kSigmas8;
  }
  return {worst_sum <= kSumTol8 && map_mismatch == 0 && z_ok,
          "sum err=" + fmt("%.3g", worst_sum) + ", map mismatches " + std::to_string(map_mismatch) +
              "/100, max |dlogZ|/se=" + fmt("%.3g", worst_z)};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double budget;  // seconds, <= 0 for none
  };
  const Entry entries[] = {
      {1, "worked example", criterion1, kBudget1},
      {2, "mean ordering vs brute force", criterion2, kBudget2},
      {3, "vertex tightness and greedy consistency", criterion3, 0},
      {4, "algebraic property suite", criterion4, kBudget4},
      {5, "ranking-measure equivalences", criterion5, 0},
      {6, "Kendall recovery", criterion6, 0},
      {7, "clustering", criterion7, 0},
      {8, "Mallows normalisation, MAP and Z invariance", criterion8, 0},
  };
  int failures = 0;
  for (const auto& e : entries) {
    const auto start = std::chrono::steady_clock::now();
    auto o = e.run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt("%.2fs", secs);
    if (e.budget > 0) {
      timing += fmt(" (budget %.0fs)", e.budget);
      if (secs >= e.budget) {
        o.pass = false;
        o.detail += "; over time budget";
      }
    }
    failures += !o.pass;
    std::printf("%s %d %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", e.id, e.name, o.detail.c_str(), timing.c_str());
  }
  return failures == 0 ? 0 : 1;
}
