#pragma once

#include <string>
#include <vector>

#include "crs/rates.hpp"

namespace crs {

/// One row of the per-solve iteration trace.
struct IterationTrace {
  int iteration = 0;
  double objective = 0.0;
  double theta = 0.0;
  double power = 0.0;
  double max_violation = 0.0;
};

/// Output of the stage-2 optimizer or of any baseline.
struct Solution {
  PrecoderSet precoders;
  std::vector<double> common_split;  // C_k
  double theta = 1.0;
  double maxmin_rate = 0.0;
  int iterations = 0;
  bool converged = false;
  int subproblem_solves = 0;    // convex solves issued, across retries and grid points
  int sca_runs = 1;             // complete SCA runs behind this solution
  std::vector<double> history;  // objective per iterate, starting at the initial point
  std::vector<IterationTrace> trace;
};

}  // namespace crs
