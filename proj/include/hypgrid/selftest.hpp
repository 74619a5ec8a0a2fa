#pragma once

#include <string>
#include <vector>

namespace hypgrid {

/** Outcome of one built-in verification suite. */
struct SuiteResult {
  std::string name;
  int checks = 0;
  int failures = 0;
};

/** Names of the built-in suites, in run order. */
const std::vector<std::string>& selftest_suite_names();

/**
 * Runs one built-in suite ("distance", "counter", "paircount", "loglik" or
 * "betweenness"), comparing the incremental structures against direct
 * reference computations on small grids.  Throws invalid-params for unknown
 * names.
 */
SuiteResult run_selftest_suite(const std::string& name);

}  // namespace hypgrid
