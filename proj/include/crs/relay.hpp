#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>

#include "crs/channel.hpp"
#include "crs/grouping.hpp"

namespace crs {

/// Top `relay_count` users by channel strength; equal strengths go to the
/// lower index. Log records rank (0 = strongest).
RelayGrouping select_centralized(const ChannelRealization& channels, int relay_count);

/// Timer-based selection simulated round by round without wall-clock time.
/// Every remaining candidate arms T_k = timer_constant / ||h_k||^2 and the
/// earliest timer fires. Simultaneous fires resolve to the lower index and
/// are noted in the log.
RelayGrouping select_decentralized(const ChannelRealization& channels, int relay_count,
                                   double timer_constant);

/// Scores a candidate grouping, typically by running the stage-2 optimizer.
using GroupingEvaluator = std::function<double(const RelayGrouping&)>;

struct EnumerationResult {
  RelayGrouping grouping;
  double rate = 0.0;
  int candidates = 0;
};

/// Exhaustive search over every nonempty proper subset of users as relays.
/// Ties go to the smaller relay set, then to the lexicographically smaller
/// one. Candidates are scored in parallel when OpenMP is available, so the
/// evaluator must be safe to call concurrently.
EnumerationResult select_optimal(const ChannelRealization& channels, const GroupingEvaluator& evaluate,
                                 int guard = 6, bool override_guard = false);

/// Every candidate relay set in enumeration order (by size, then lexicographic).
std::vector<std::vector<int>> enumerate_relay_sets(int num_users);

/// One relay drawn uniformly from the users.
RelayGrouping select_random(int num_users, std::uint64_t seed);

/// ceil(K/2), the relay count of the "K/2 best relays" protocol.
inline int half_relay_count(int num_users) { return (num_users + 1) / 2; }

enum class OverheadScheme { centralized, decentralized, none };

OverheadScheme parse_overhead_scheme(std::string_view name);
std::string_view to_string(OverheadScheme scheme);

/// Packet lengths in symbols plus the symbol duration.
struct PacketSizes {
  long long rts = 0;
  long long cts = 0;
  long long flag_centralized = 0;
  long long flag_decentralized = 0;
  double symbol_duration = 1.0;
};

struct OverheadReport {
  long long signaling_symbols = 0;
  double time_units = 0.0;
  OverheadScheme scheme = OverheadScheme::none;
  PacketSizes packet_sizes;
};

/// Signaling and time cost of the handshake and selection exchange.
/// `fired_timers` are the decentralized timer values of the selected relays.
OverheadReport overhead(OverheadScheme scheme, int num_users, int relay_count,
                        const PacketSizes& sizes, std::span<const double> fired_timers = {});

/// Fired timer values recovered from a decentralized selection log.
std::vector<double> fired_timers(const RelayGrouping& grouping);

}  // namespace crs
