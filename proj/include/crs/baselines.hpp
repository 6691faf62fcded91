#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "crs/channel.hpp"
#include "crs/config.hpp"
#include "crs/grouping.hpp"
#include "crs/solution.hpp"

namespace crs {

enum class StrategyKind { crs_sca, crs_grid, ers, nrs, sdma };

struct Strategy {
  StrategyKind kind = StrategyKind::crs_sca;
  double grid_step = 0.1;  // CRS-grid only

  /// Whether the strategy uses a relay grouping at all.
  bool uses_relays() const { return kind == StrategyKind::crs_sca || kind == StrategyKind::crs_grid || kind == StrategyKind::ers; }
  void validate() const;
};

/// Names as they appear in scenario files and CSV output: CRS-SCA, CRS-grid, ERS, NRS, SDMA.
StrategyKind parse_strategy(std::string_view name);
std::string_view to_string(StrategyKind kind);

/// Rate splitting without cooperation: time fraction frozen at 1.
Solution solve_nrs(const ChannelRealization& channels, const SystemConfig& config);

/// Cooperative rate splitting with equal slots: time fraction frozen at 1/2.
Solution solve_ers(const ChannelRealization& channels, const RelayGrouping& grouping, const SystemConfig& config);

/// Linear precoding with interference treated as noise: no common stream.
Solution solve_sdma(const ChannelRealization& channels, const SystemConfig& config);

/// Time fractions delta, 2 delta, ..., 1 (up to rounding); one fixed-fraction
/// solve each, grid points solved in parallel when OpenMP is available.
std::vector<double> theta_grid(double step);

/// Best fixed-fraction solution over theta_grid(step). `subproblem_solves`
/// accumulates over every grid point; `iterations` is that of the winner.
Solution solve_crs_grid(const ChannelRealization& channels, const RelayGrouping& grouping, const SystemConfig& config,
                        double step);

/// Dispatches on the strategy. `grouping` is ignored by NRS and SDMA.
Solution solve_strategy(const Strategy& strategy, const ChannelRealization& channels, const RelayGrouping* grouping,
                        const SystemConfig& config);

}  // namespace crs
