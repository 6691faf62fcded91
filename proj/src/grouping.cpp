#include "crs/grouping.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "crs/errors.hpp"

namespace crs {

void RelayGrouping::validate(int num_users) const {
  if (group1.empty()) throw ConfigError("relay group must be nonempty");
  if (group2.empty()) throw ConfigError("assisted group must be nonempty");
  std::vector<int> seen(static_cast<std::size_t>(num_users), 0);
  for (const auto* g : {&group1, &group2})
    for (int k : *g) {
      if (k < 0 || k >= num_users) throw ConfigError(fmt::format("user {} out of range", k));
      if (seen[static_cast<std::size_t>(k)]++) throw ConfigError(fmt::format("user {} listed twice", k));
    }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw ConfigError("groups do not cover every user");
}

bool RelayGrouping::is_relay(int user) const {
  return std::find(group1.begin(), group1.end(), user) != group1.end();
}

RelayGrouping RelayGrouping::from_relays(std::vector<int> relays, int num_users) {
  RelayGrouping g;
  std::sort(relays.begin(), relays.end());
  g.group1 = std::move(relays);
  for (int k = 0; k < num_users; ++k)
    if (!std::binary_search(g.group1.begin(), g.group1.end(), k)) g.group2.push_back(k);
  g.validate(num_users);
  return g;
}

void write_selection_log(std::ostream& os, const RelayGrouping& grouping) {
  os << "relays " << fmt::format("{}", fmt::join(grouping.group1, ",")) << " assisted "
     << fmt::format("{}", fmt::join(grouping.group2, ",")) << '\n';
  for (const auto& e : grouping.selection_log) {
    os << fmt::format("round={} user={} value={:.12g}", e.round, e.user, e.value);
    if (!e.note.empty()) os << " note=" << e.note;
    os << '\n';
  }
}

std::string format_selection_log(const RelayGrouping& grouping) {
  std::ostringstream os;
  write_selection_log(os, grouping);
  return os.str();
}

}  // namespace crs
