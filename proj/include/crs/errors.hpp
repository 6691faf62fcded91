#pragma once

#include <stdexcept>
#include <string>

namespace crs {

/// Invalid configuration or violated precondition supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The common-rate split asks for more than the achievable common rate.
class SplitInfeasibleError : public std::runtime_error {
 public:
  SplitInfeasibleError(const std::string& what, double violation)
      : std::runtime_error(what), violation_(violation) {}
  double violation() const noexcept { return violation_; }

 private:
  double violation_;
};

/// Decentralized selection cannot make progress (a remaining candidate never fires).
class SelectionStallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No interior crossing of the two group common rates exists.
class NoCrossoverError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The iterative solver could not produce a usable iterate.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem problems while emitting reports.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crs
