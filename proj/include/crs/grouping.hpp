#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crs {

/// One step of a relay-selection run.
struct SelectionEvent {
  int round = 0;
  int user = 0;
  double value = 0.0;  // rank for centralized, fired timer for decentralized
  std::string note;
};

/// Partition of users (0-based) into relays (group1) and assisted users (group2).
struct RelayGrouping {
  std::vector<int> group1;
  std::vector<int> group2;
  std::vector<SelectionEvent> selection_log;

  /// Throws ConfigError unless the groups partition {0..num_users-1} with
  /// both groups nonempty.
  void validate(int num_users) const;
  bool is_relay(int user) const;

  /// Builds group2 as the sorted complement of the given relay set.
  static RelayGrouping from_relays(std::vector<int> relays, int num_users);
};

/// Line-oriented dump: a header line with the groups, then one line per event.
void write_selection_log(std::ostream& os, const RelayGrouping& grouping);
std::string format_selection_log(const RelayGrouping& grouping);

}  // namespace crs
