// Divergences of one score vector against every ordering of three items.

#include <cstdio>

#include "lbdiv/lbdiv.hpp"

int main() {
  using namespace lbdiv;
  const std::vector x{0.9, 0.1, 0.5};
  const SetFunction gens[] = {SetFunction::cardinality_sqrt(3), SetFunction::uniform_cut(3),
                              SetFunction::top_m(3, 1)};
  const char* labels[] = {"sqrt", "cut", "top-1"};
  std::printf("x = (0.9, 0.1, 0.5), sigma_x = %s\n", induced_ordering(x).to_string().c_str());
  std::printf("%-10s", "sigma");
  for (const char* l : labels) std::printf(" %14s", l);
  std::printf(" %8s\n", "kendall");
  for_each_permutation(3, [&](const Permutation& s) {
    std::printf("%-10s", s.to_string().c_str());
    for (const auto& f : gens) std::printf(" %14.10f", lb_divergence(f, x, s));
    std::printf(" %8llu\n", static_cast<unsigned long long>(kendall_tau(induced_ordering(x), s)));
  });
}
