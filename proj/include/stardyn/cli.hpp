#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stardyn::cli {

enum ExitCode : int {
  kOk = 0,
  kInconsistency = 1,
  kUsage = 2,
  kCap = 3,
};

// args[0] is the program name. Everything the command prints goes to `out`
// in one piece after it succeeds; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stardyn::cli
