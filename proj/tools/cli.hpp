#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lbdiv/submodular.hpp"

namespace lbdiv::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,     // bad flags or arguments
  kInput = 2,     // unreadable or malformed input
  kDomain = 3,    // input violates a precondition
  kInternal = 4,
};

// Generator grammar, resolved once the ground-set size n is known:
//   cardinality:sqrt | cardinality:log | cardinality:file=<path>
//   cut:uniform | cut:file=<path> | topm:<m> | max | range | table:file=<path>
SetFunction parse_generator(std::string_view spec, std::size_t n);

// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lbdiv::cli
