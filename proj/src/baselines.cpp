#include "crs/baselines.hpp"

#include <cmath>
#include <exception>

#include <fmt/format.h>

#include "crs/errors.hpp"
#include "crs/sca.hpp"

namespace crs {

void Strategy::validate() const {
  if (kind == StrategyKind::crs_grid && !(grid_step > 0.0 && grid_step < 1.0))
    throw ConfigError("grid step must lie in (0, 1)");
}

StrategyKind parse_strategy(std::string_view name) {
  if (name == "CRS-SCA") return StrategyKind::crs_sca;
  if (name == "CRS-grid") return StrategyKind::crs_grid;
  if (name == "ERS") return StrategyKind::ers;
  if (name == "NRS") return StrategyKind::nrs;
  if (name == "SDMA") return StrategyKind::sdma;
  throw ConfigError(fmt::format("unknown strategy '{}'", name));
}

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::crs_sca: return "CRS-SCA";
    case StrategyKind::crs_grid: return "CRS-grid";
    case StrategyKind::ers: return "ERS";
    case StrategyKind::nrs: return "NRS";
    case StrategyKind::sdma: return "SDMA";
  }
  return "?";
}

Solution solve_nrs(const ChannelRealization& channels, const SystemConfig& config) {
  return sca_solve(channels, nullptr, config, ScaMode{1.0, true});
}

Solution solve_ers(const ChannelRealization& channels, const RelayGrouping& grouping, const SystemConfig& config) {
  return sca_solve(channels, &grouping, config, ScaMode{0.5, true});
}

Solution solve_sdma(const ChannelRealization& channels, const SystemConfig& config) {
  return sca_solve(channels, nullptr, config, ScaMode{1.0, false});
}

std::vector<double> theta_grid(double step) {
  if (!(step > 0.0 && step < 1.0)) throw ConfigError("grid step must lie in (0, 1)");
  std::vector<double> grid;
  const int count = static_cast<int>(std::floor(1.0 / step + 1e-9));
  for (int i = 1; i <= count; ++i) grid.push_back(std::min(1.0, i * step));
  if (grid.empty() || grid.back() < 1.0 - 1e-9) grid.push_back(1.0);
  grid.back() = 1.0;
  return grid;
}

Solution solve_crs_grid(const ChannelRealization& channels, const RelayGrouping& grouping, const SystemConfig& config,
                        double step) {
  const auto grid = theta_grid(step);
  const auto n = static_cast<long>(grid.size());
  std::vector<Solution> results(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());

#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    try {
      results[u] = sca_solve(channels, &grouping, config, ScaMode{grid[u], true});
    } catch (...) {
      errors[u] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  // First best wins, so ties go to the smaller time fraction.
  std::size_t best = 0;
  int solves = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    solves += results[i].subproblem_solves;
    if (results[i].maxmin_rate > results[best].maxmin_rate) best = i;
  }
  Solution out = std::move(results[best]);
  out.subproblem_solves = solves;
  out.sca_runs = static_cast<int>(grid.size());
  return out;
}

Solution solve_strategy(const Strategy& strategy, const ChannelRealization& channels, const RelayGrouping* grouping,
                        const SystemConfig& config) {
  strategy.validate();
  if (strategy.uses_relays() && !grouping)
    throw ConfigError(fmt::format("strategy {} needs a relay grouping", to_string(strategy.kind)));
  switch (strategy.kind) {
    case StrategyKind::crs_sca: return sca_solve(channels, grouping, config);
    case StrategyKind::crs_grid: return solve_crs_grid(channels, *grouping, config, strategy.grid_step);
    case StrategyKind::ers: return solve_ers(channels, *grouping, config);
    case StrategyKind::nrs: return solve_nrs(channels, config);
    case StrategyKind::sdma: return solve_sdma(channels, config);
  }
  throw ConfigError("unknown strategy");
}

}  // namespace crs
