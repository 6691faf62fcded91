#pragma once

#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "crs/channel.hpp"
#include "crs/grouping.hpp"

namespace crs {

/// Common precoder plus one private precoder per user.
struct PrecoderSet {
  Eigen::VectorXcd common;
  std::vector<Eigen::VectorXcd> privates;

  static PrecoderSet zeros(int num_users, int num_tx_antennas);
  double total_power() const;  // tr(P P^H)
};

/// Rates (bits/s/Hz) of one solution under one grouping.
struct RateBreakdown {
  std::vector<double> private_direct;
  std::vector<double> common_direct;
  std::vector<double> common_coop;  // zero for relays
  double group1_common = 0.0;
  double group2_common = 0.0;
  double achievable_common = 0.0;
  std::vector<double> totals;
  double maxmin = 0.0;
};

struct Solution;

// SINRs before the time-fraction scaling. The private SINR excludes the
// common stream (removed by SIC); the common SINR treats every private
// stream as interference.
double private_sinr(const ChannelRealization& channels, const PrecoderSet& precoders, int k);
double common_sinr(const ChannelRealization& channels, const PrecoderSet& precoders, int k);

double private_rate_direct(const ChannelRealization& channels, const PrecoderSet& precoders,
                           int k, double theta);
double common_rate_direct(const ChannelRealization& channels, const PrecoderSet& precoders,
                          int k, double theta);

/// log2(1 + sum_j P_j |h_{k,j}|^2) over the relays; the time-free
/// cooperative log term.
double coop_log_term(const ChannelRealization& channels, std::span<const int> relays,
                     std::span<const double> relay_powers, int k);
double common_rate_coop(const ChannelRealization& channels, std::span<const int> relays,
                        std::span<const double> relay_powers, int k, double theta);

struct GroupCommonRates {
  double group1 = 0.0;
  double group2 = 0.0;
  double common = 0.0;
};

/// group1 = min of direct common rates of relays, group2 = min of combined
/// rates of assisted users, common = min of the two.
GroupCommonRates achievable_common_rate(std::span<const double> group1_direct,
                                        std::span<const double> group2_combined);

/// Feasibility slack on split and power checks.
inline constexpr double kFeasibilitySlack = 1e-6;

/// Full breakdown of a solution. A null grouping means no relaying: every
/// user decodes the common stream from the direct phase only.
RateBreakdown evaluate_solution(const ChannelRealization& channels, const RelayGrouping* grouping,
                                std::span<const double> relay_powers, double bs_power,
                                const Solution& solution);

/// The time fraction at which the two linear group common rates meet.
double theta_crossover(double f1_worst_group1, double f1_worst_group2, double f2_worst_group2);

struct Crossover {
  double theta = 0.0;
  int worst_group1 = -1;
  int worst_group2 = -1;
};

/// Crossover for actual precoders: the worst relay is the arg-min of the
/// direct log term; the worst assisted user is the one whose line is first
/// crossed, i.e. the arg-min of the per-user crossing points.
Crossover theta_crossover(const ChannelRealization& channels, const PrecoderSet& precoders,
                          const RelayGrouping& grouping, std::span<const double> relay_powers);

}  // namespace crs
