// Aggregates a score matrix, prints the mean ordering, then clusters it.
//   aggregate_demo [matrix.csv] [k]

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "lbdiv/io.hpp"
#include "lbdiv/lbdiv.hpp"

int main(int argc, char** argv) {
  using namespace lbdiv;
  try {
    const std::string path = argc > 1 ? argv[1] : LBDIV_SAMPLE_DATA "/five_vectors.csv";
    auto in = io::open_input(path);
    const auto x = io::read_score_matrix_csv(in);
    const auto f = SetFunction::cardinality_sqrt(x.cols());

    const auto m = mean_ordering(x, f);
    std::printf("mean:");
    for (double v : m.mean) std::printf(" %.12g", v);
    std::printf("\nordering: %s\nobjective: %.12g\ntotal variation: %.12g\n", m.ordering.to_string().c_str(),
                aggregation_objective(x, f, m.ordering), total_variation(m.mean));

    const std::size_t k = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 2;
    if (k <= x.rows()) {
      const auto res = lb_kmeans(x, f, {.k = k});
      std::printf("k-means (k=%zu): objective %.12g after %zu iterations\n", k, res.objective, res.iterations);
      for (std::size_t c = 0; c < k; ++c) {
        std::printf("  cluster %zu %s:", c + 1, res.representatives[c].to_string().c_str());
        for (std::size_t r = 0; r < x.rows(); ++r)
          if (res.assignments[r] == c) std::printf(" %zu", r + 1);
        std::printf("\n");
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "aggregate_demo: %s\n", e.what());
    return 1;
  }
}
