#include "crs/relay.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "crs/errors.hpp"

namespace crs {

namespace {

void check_relay_count(int num_users, int relay_count) {
  if (relay_count < 1 || relay_count >= num_users)
    throw ConfigError(fmt::format("relay count {} outside [1, {}]", relay_count, num_users - 1));
}

}  // namespace

RelayGrouping select_centralized(const ChannelRealization& channels, int relay_count) {
  const int k_users = channels.num_users();
  check_relay_count(k_users, relay_count);
  const auto strength = channel_strengths(channels);
  std::vector<int> order(static_cast<std::size_t>(k_users));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return strength[static_cast<std::size_t>(a)] > strength[static_cast<std::size_t>(b)];
  });

  std::vector<int> relays(order.begin(), order.begin() + relay_count);
  auto grouping = RelayGrouping::from_relays(relays, k_users);
  for (int r = 0; r < relay_count; ++r)
    grouping.selection_log.push_back({r, order[static_cast<std::size_t>(r)], static_cast<double>(r), {}});
  return grouping;
}

RelayGrouping select_decentralized(const ChannelRealization& channels, int relay_count,
                                   double timer_constant) {
  const int k_users = channels.num_users();
  check_relay_count(k_users, relay_count);
  if (!(timer_constant > 0.0)) throw ConfigError("timer constant must be strictly positive");
  const auto strength = channel_strengths(channels);

  std::vector<int> remaining(static_cast<std::size_t>(k_users));
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<int> relays;
  std::vector<SelectionEvent> log;

  for (int round = 0; round < relay_count; ++round) {
    // Timers are re-armed every round; a zero-strength user never fires.
    double earliest = std::numeric_limits<double>::infinity();
    int fired = -1;
    int simultaneous = 0;
    for (int k : remaining) {
      const double s = strength[static_cast<std::size_t>(k)];
      if (!(s > 0.0)) continue;
      const double timer = timer_constant / s;
      if (timer < earliest) {
        earliest = timer;
        fired = k;
        simultaneous = 1;
      } else if (timer == earliest) {
        ++simultaneous;
      }
    }
    if (fired < 0)
      throw SelectionStallError(
          fmt::format("round {}: no remaining user has a positive channel strength", round));

    SelectionEvent event{round, fired, earliest, {}};
    if (simultaneous > 1) {
      event.note = fmt::format("tie:{}", simultaneous);
      spdlog::warn("decentralized selection round {}: {} timers fired together, user {} kept",
                   round, simultaneous, fired);
    }
    log.push_back(std::move(event));
    relays.push_back(fired);
    remaining.erase(std::find(remaining.begin(), remaining.end(), fired));
  }

  auto grouping = RelayGrouping::from_relays(relays, k_users);
  grouping.selection_log = std::move(log);
  return grouping;
}

std::vector<std::vector<int>> enumerate_relay_sets(int num_users) {
  std::vector<std::vector<int>> sets;
  for (int size = 1; size < num_users; ++size) {
    // Lexicographic combinations of `size` out of `num_users`.
    std::vector<int> comb(static_cast<std::size_t>(size));
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
      sets.push_back(comb);
      int i = size - 1;
      while (i >= 0 && comb[static_cast<std::size_t>(i)] == num_users - size + i) --i;
      if (i < 0) break;
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < size; ++j)
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return sets;
}

EnumerationResult select_optimal(const ChannelRealization& channels, const GroupingEvaluator& evaluate,
                                 int guard, bool override_guard) {
  const int k_users = channels.num_users();
  if (k_users < 2) throw ConfigError("enumeration needs at least two users");
  if (k_users > guard && !override_guard)
    throw ConfigError(fmt::format("relay enumeration for K={} exceeds the guard K<={}", k_users, guard));

  const auto sets = enumerate_relay_sets(k_users);
  const auto n = static_cast<long>(sets.size());
  std::vector<RelayGrouping> candidates;
  candidates.reserve(sets.size());
  for (const auto& s : sets) candidates.push_back(RelayGrouping::from_relays(s, k_users));
  std::vector<double> rates(sets.size(), -std::numeric_limits<double>::infinity());

#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) rates[static_cast<std::size_t>(i)] = evaluate(candidates[static_cast<std::size_t>(i)]);

  // Enumeration order already ranks smaller sets first, then lexicographic,
  // so a strict comparison implements the tie rule.
  std::size_t best = 0;
  for (std::size_t i = 1; i < rates.size(); ++i)
    if (rates[i] > rates[best]) best = i;

  EnumerationResult out;
  out.grouping = candidates[best];
  out.rate = rates[best];
  out.candidates = static_cast<int>(n);
  for (std::size_t i = 0; i < rates.size(); ++i)
    out.grouping.selection_log.push_back(
        {static_cast<int>(i), sets[i].front(), rates[i], fmt::format("set:{}", fmt::join(sets[i], "+"))});
  return out;
}

RelayGrouping select_random(int num_users, std::uint64_t seed) {
  if (num_users < 2) throw ConfigError("random relay selection needs at least two users");
  GaussianSource rng(seed);
  const int pick = std::min(num_users - 1, static_cast<int>(rng.uniform() * num_users));
  auto grouping = RelayGrouping::from_relays({pick}, num_users);
  grouping.selection_log.push_back({0, pick, 0.0, "random"});
  return grouping;
}

OverheadScheme parse_overhead_scheme(std::string_view name) {
  if (name == "centralized") return OverheadScheme::centralized;
  if (name == "decentralized") return OverheadScheme::decentralized;
  if (name == "none") return OverheadScheme::none;
  throw ConfigError(fmt::format("unknown overhead scheme '{}'", name));
}

std::string_view to_string(OverheadScheme scheme) {
  switch (scheme) {
    case OverheadScheme::centralized: return "centralized";
    case OverheadScheme::decentralized: return "decentralized";
    case OverheadScheme::none: return "none";
  }
  return "none";
}

OverheadReport overhead(OverheadScheme scheme, int num_users, int relay_count, const PacketSizes& sizes,
                        std::span<const double> fired) {
  if (sizes.rts < 0 || sizes.cts < 0 || sizes.flag_centralized < 0 || sizes.flag_decentralized < 0 ||
      sizes.symbol_duration < 0.0)
    throw ConfigError("packet sizes must be nonnegative");
  if (num_users < 1 || relay_count < 0) throw ConfigError("invalid user or relay count");

  OverheadReport r;
  r.scheme = scheme;
  r.packet_sizes = sizes;
  const long long handshake = sizes.rts + sizes.cts * num_users;
  switch (scheme) {
    case OverheadScheme::centralized:
      r.signaling_symbols = handshake + sizes.flag_centralized;
      r.time_units = static_cast<double>(r.signaling_symbols) * sizes.symbol_duration;
      break;
    case OverheadScheme::decentralized: {
      r.signaling_symbols = handshake + sizes.flag_decentralized * relay_count;
      double timers = 0.0;
      for (double t : fired) timers += t;
      r.time_units = static_cast<double>(r.signaling_symbols) * sizes.symbol_duration + timers;
      break;
    }
    case OverheadScheme::none:
      r.signaling_symbols = handshake;
      r.time_units = static_cast<double>(handshake) * sizes.symbol_duration;
      break;
    default:
      throw ConfigError("unknown overhead scheme");
  }
  return r;
}

std::vector<double> fired_timers(const RelayGrouping& grouping) {
  std::vector<double> t;
  for (const auto& e : grouping.selection_log) t.push_back(e.value);
  return t;
}

}  // namespace crs
