#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crs {

struct PropertyOptions {
  int instances = 10;      // random instances for the solver-backed suites
  int samples = 100000;    // random points for the closed-form suites
  std::uint64_t seed = 1;
  std::string filter;      // substring match on suite names; empty runs all
};

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Names of every suite, in run order.
std::vector<std::string> property_suite_names();

/// Randomized invariant checks over channels, rates, relay selection, the
/// convex solver, the SCA iteration and the strategy ordering.
std::vector<PropertyResult> run_property_suites(const PropertyOptions& options);

}  // namespace crs
