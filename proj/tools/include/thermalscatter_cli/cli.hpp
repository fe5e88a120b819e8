#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ts::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,   // a verified inequality or criterion did not hold
  exit_precondition = 2,   // usage, contract or precondition error
  exit_not_converged = 3,  // results written but flagged non-converged
};

// Runs one command line. Standard output is buffered and only emitted when the
// command reaches a result, so a usage or contract error leaves out untouched.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ts::cli
