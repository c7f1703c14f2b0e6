#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cflow::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitViolation = 1,  // an inequality gap below -1e-9
  kExitOperator = 2,   // operator, convexity or validation error
  kExitIo = 3,
  kExitUsage = 64,
};

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cflow::cli
