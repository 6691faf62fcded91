#include "crs/rates.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "crs/errors.hpp"
#include "crs/solution.hpp"

namespace crs {

namespace {

void check_user(const ChannelRealization& channels, int k) {
  if (k < 0 || k >= channels.num_users())
    throw std::out_of_range(fmt::format("user index {} out of range [0, {})", k, channels.num_users()));
}

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in [0, 1]");
}

double gain(const Eigen::VectorXcd& h, const Eigen::VectorXcd& p) {
  return std::norm(h.dot(p));  // |h^H p|^2; Eigen's dot conjugates the left operand
}

double private_interference(const ChannelRealization& channels, const PrecoderSet& precoders, int k) {
  const auto& h = channels.bs_channels[static_cast<std::size_t>(k)];
  double sum = 0.0;
  for (std::size_t j = 0; j < precoders.privates.size(); ++j)
    if (static_cast<int>(j) != k) sum += gain(h, precoders.privates[j]);
  return sum;
}

}  // namespace

PrecoderSet PrecoderSet::zeros(int num_users, int num_tx_antennas) {
  PrecoderSet p;
  p.common = Eigen::VectorXcd::Zero(num_tx_antennas);
  p.privates.assign(static_cast<std::size_t>(num_users), Eigen::VectorXcd::Zero(num_tx_antennas));
  return p;
}

double PrecoderSet::total_power() const {
  double power = common.squaredNorm();
  for (const auto& p : privates) power += p.squaredNorm();
  return power;
}

double private_sinr(const ChannelRealization& channels, const PrecoderSet& precoders, int k) {
  check_user(channels, k);
  const auto& h = channels.bs_channels[static_cast<std::size_t>(k)];
  return gain(h, precoders.privates[static_cast<std::size_t>(k)]) /
         (private_interference(channels, precoders, k) + 1.0);
}

double common_sinr(const ChannelRealization& channels, const PrecoderSet& precoders, int k) {
  check_user(channels, k);
  const auto& h = channels.bs_channels[static_cast<std::size_t>(k)];
  const double own = gain(h, precoders.privates[static_cast<std::size_t>(k)]);
  return gain(h, precoders.common) / (private_interference(channels, precoders, k) + own + 1.0);
}

double private_rate_direct(const ChannelRealization& channels, const PrecoderSet& precoders, int k,
                           double theta) {
  check_theta(theta);
  return theta * std::log2(1.0 + private_sinr(channels, precoders, k));
}

double common_rate_direct(const ChannelRealization& channels, const PrecoderSet& precoders, int k,
                          double theta) {
  check_theta(theta);
  return theta * std::log2(1.0 + common_sinr(channels, precoders, k));
}

double coop_log_term(const ChannelRealization& channels, std::span<const int> relays,
                     std::span<const double> relay_powers, int k) {
  check_user(channels, k);
  if (std::find(relays.begin(), relays.end(), k) != relays.end())
    throw ConfigError(fmt::format("user {} is a relay and has no cooperative rate", k));
  double snr = 0.0;
  for (int j : relays) {
    check_user(channels, j);
    snr += relay_powers[static_cast<std::size_t>(j)] * std::norm(channels.user_channels(k, j));
  }
  return std::log2(1.0 + snr);
}

double common_rate_coop(const ChannelRealization& channels, std::span<const int> relays,
                        std::span<const double> relay_powers, int k, double theta) {
  check_theta(theta);
  return (1.0 - theta) * coop_log_term(channels, relays, relay_powers, k);
}

GroupCommonRates achievable_common_rate(std::span<const double> group1_direct,
                                        std::span<const double> group2_combined) {
  if (group1_direct.empty() || group2_combined.empty())
    throw ConfigError("both user groups must be nonempty");
  GroupCommonRates r;
  r.group1 = *std::min_element(group1_direct.begin(), group1_direct.end());
  r.group2 = *std::min_element(group2_combined.begin(), group2_combined.end());
  r.common = std::min(r.group1, r.group2);
  return r;
}

RateBreakdown evaluate_solution(const ChannelRealization& channels, const RelayGrouping* grouping,
                                std::span<const double> relay_powers, double bs_power,
                                const Solution& solution) {
  const int k_users = channels.num_users();
  if (static_cast<int>(solution.precoders.privates.size()) != k_users)
    throw ConfigError("solution has the wrong number of private precoders");
  if (static_cast<int>(solution.common_split.size()) != k_users)
    throw ConfigError("solution has the wrong common split length");
  if (grouping) grouping->validate(k_users);
  const double theta = solution.theta;
  check_theta(theta);

  const double power = solution.precoders.total_power();
  if (power > bs_power * (1.0 + kFeasibilitySlack))
    throw ConfigError(fmt::format("precoder power {} exceeds budget {}", power, bs_power));

  RateBreakdown out;
  out.private_direct.resize(static_cast<std::size_t>(k_users));
  out.common_direct.resize(static_cast<std::size_t>(k_users));
  out.common_coop.assign(static_cast<std::size_t>(k_users), 0.0);
  for (int k = 0; k < k_users; ++k) {
    out.private_direct[static_cast<std::size_t>(k)] = private_rate_direct(channels, solution.precoders, k, theta);
    out.common_direct[static_cast<std::size_t>(k)] = common_rate_direct(channels, solution.precoders, k, theta);
  }

  if (grouping) {
    std::vector<double> g1;
    std::vector<double> g2;
    for (int k : grouping->group1) g1.push_back(out.common_direct[static_cast<std::size_t>(k)]);
    for (int k : grouping->group2) {
      const double coop = common_rate_coop(channels, grouping->group1, relay_powers, k, theta);
      out.common_coop[static_cast<std::size_t>(k)] = coop;
      g2.push_back(out.common_direct[static_cast<std::size_t>(k)] + coop);
    }
    const auto g = achievable_common_rate(g1, g2);
    out.group1_common = g.group1;
    out.group2_common = g.group2;
    out.achievable_common = g.common;
  } else {
    const double worst = *std::min_element(out.common_direct.begin(), out.common_direct.end());
    out.group1_common = out.group2_common = out.achievable_common = worst;
  }

  double split_sum = 0.0;
  for (double c : solution.common_split) {
    if (c < -kFeasibilitySlack)
      throw SplitInfeasibleError(fmt::format("negative common split {}", c), -c);
    split_sum += c;
  }
  const double excess = split_sum - out.achievable_common;
  if (excess > kFeasibilitySlack * std::max(1.0, out.achievable_common))
    throw SplitInfeasibleError(
        fmt::format("common split {} exceeds achievable common rate {} by {}", split_sum,
                    out.achievable_common, excess),
        excess);

  out.totals.resize(static_cast<std::size_t>(k_users));
  for (std::size_t k = 0; k < out.totals.size(); ++k)
    out.totals[k] = out.private_direct[k] + solution.common_split[k];
  out.maxmin = *std::min_element(out.totals.begin(), out.totals.end());
  return out;
}

double theta_crossover(double f1_worst_group1, double f1_worst_group2, double f2_worst_group2) {
  const double denom = f1_worst_group1 - f1_worst_group2 + f2_worst_group2;
  if (!(denom > 0.0))
    throw NoCrossoverError("group common rates do not cross at a positive time fraction");
  return f2_worst_group2 / denom;
}

Crossover theta_crossover(const ChannelRealization& channels, const PrecoderSet& precoders,
                          const RelayGrouping& grouping, std::span<const double> relay_powers) {
  grouping.validate(channels.num_users());
  Crossover out;
  double f1_relay = std::numeric_limits<double>::infinity();
  for (int k : grouping.group1) {
    const double f1 = std::log2(1.0 + common_sinr(channels, precoders, k));
    if (f1 < f1_relay) {
      f1_relay = f1;
      out.worst_group1 = k;
    }
  }
  out.theta = std::numeric_limits<double>::infinity();
  for (int k : grouping.group2) {
    const double f1 = std::log2(1.0 + common_sinr(channels, precoders, k));
    const double f2 = coop_log_term(channels, grouping.group1, relay_powers, k);
    double gamma = 0.0;
    try {
      gamma = theta_crossover(f1_relay, f1, f2);
    } catch (const NoCrossoverError&) {
      continue;
    }
    if (gamma < out.theta) {
      out.theta = gamma;
      out.worst_group2 = k;
    }
  }
  if (out.worst_group2 < 0)
    throw NoCrossoverError("no assisted user's combined rate crosses the relay common rate");
  return out;
}

}  // namespace crs
