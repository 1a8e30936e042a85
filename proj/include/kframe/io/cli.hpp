#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kframe/io/json_format.hpp"
#include "kframe/io/problem.hpp"

namespace kframe::io {

enum ExitCode : int {
  kExitTrue = 0,
  kExitFalse = 1,
  kExitInputError = 2,
  kExitNumericalFailure = 3,
};

struct RunOptions {
  double tol = 1e-9;
  int max_iter = 10000;
  std::uint64_t seed = 42;
};

struct CommandOutcome {
  Json result;
  bool truth = false;
};

// Executes one subcommand on a parsed problem. Throws kframe::Error.
CommandOutcome execute(const std::string& command, const ProblemFile& problem, const RunOptions& opts);

const std::vector<std::string>& subcommands();

// Full CLI: args excludes the program name. Reports go to `out`, diagnostics
// and usage text to `err`. Returns the process exit code.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kframe::io
