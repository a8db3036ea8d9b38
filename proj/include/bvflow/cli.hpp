#pragma once

#include "bvflow/io.hpp"

#include <iosfwd>

namespace bvflow::cli {

struct RunResult {
  std::vector<CheckRecord> records;  // ordered by suite name, then by emission
  std::vector<std::string> notes;
  bool pass = false;
  int exit_code = 1;
};

// Suites requested by the scenario, or the default set when it names none.
std::vector<std::string> effective_checks(const io::Scenario& sc);

// Runs the suites in parallel (at most BVFLOW_THREADS workers) and merges them in suite-name order.
// Throws io::InputError / std::invalid_argument on bad input. A nonempty trajectory_path receives
// the evolved interaction as CSV rows (t, hbar_order, monomial, coeff).
RunResult run_scenario(const io::Scenario& sc, bool timing = false, const std::string& trajectory_path = "");

// Checks the scenario invariants that depend on the scalar mode (grid order, positivity).
void validate_scenario(const io::Scenario& sc);

// Verbs: check | flow | evolve | reconstruct | sample. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bvflow::cli
