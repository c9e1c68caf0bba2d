#pragma once

#include <iosfwd>

#include "config.hpp"

namespace erasurelab::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kInfeasible = 3,
  kBudgetExceeded = 4,
};

// Runs every n of the grid and writes measurements.csv, predictions.csv and
// summary.json into config.output. A failing n (infeasible schedule, budget)
// is recorded in the summary and the remaining n still run; the return value
// is then the exit code of the first failure.
int run(const ExperimentConfig& config, std::ostream& log);

// Full command line: subcommands capacity, predict, simulate, oracle, cgf, ge,
// concentration, types.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace erasurelab::cli
