#pragma once

#include <iosfwd>

namespace cspnn::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIoOrParse = 2,
  kContract = 3,
};

/// Entry point of the `cspnn` tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cspnn::cli
