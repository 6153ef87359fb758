#pragma once

#include <iosfwd>

namespace ckin::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kValidation = 2,
  kNumerical = 3,
};

/// Entry point of the `ckin` tool. Output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ckin::cli
