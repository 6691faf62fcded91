#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "crs/errors.hpp"
#include "crs/harness.hpp"

namespace crs::harness {

using nlohmann::json;

SweepKind parse_sweep_kind(std::string_view name) {
  if (name == "snr_db") return SweepKind::snr_db;
  if (name == "num_users") return SweepKind::num_users;
  if (name == "relay_power_db") return SweepKind::relay_power_db;
  throw ConfigError(fmt::format("unknown sweep kind '{}'", name));
}

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::snr_db: return "snr_db";
    case SweepKind::num_users: return "num_users";
    case SweepKind::relay_power_db: return "relay_power_db";
  }
  return "?";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "optimal") return Protocol::optimal;
  if (name == "1-best") return Protocol::one_best;
  if (name == "K/2-best") return Protocol::half_best;
  if (name == "1-random") return Protocol::one_random;
  throw ConfigError(fmt::format("unknown protocol '{}'", name));
}

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::optimal: return "optimal";
    case Protocol::one_best: return "1-best";
    case Protocol::half_best: return "K/2-best";
    case Protocol::one_random: return "1-random";
  }
  return "?";
}

namespace {

std::vector<double> decreasing_variances(int k_users) {
  std::vector<double> v;
  for (int k = 0; k < k_users; ++k) v.push_back(1.0 - static_cast<double>(k) / k_users);
  return v;
}

int users_at(const Scenario& s, double sweep_value) {
  return s.sweep_kind == SweepKind::num_users ? static_cast<int>(std::lround(sweep_value)) : s.num_users;
}

}  // namespace

SystemConfig Scenario::config_at(double sweep_value) const {
  const int k_users = users_at(*this, sweep_value);
  const double snr = sweep_kind == SweepKind::snr_db ? sweep_value : snr_db;
  std::vector<double> variances = bs_variances;
  if (sweep_kind == SweepKind::num_users || variances.empty()) variances = decreasing_variances(k_users);

  SystemConfig c = SystemConfig::standard(k_users, num_tx_antennas, snr, variances);
  for (int k = 0; k < k_users; ++k)
    for (int j = 0; j < k_users; ++j)
      if (j != k) c.user_variances(k, j) = user_variance;
  if (sweep_kind == SweepKind::relay_power_db) c.relay_powers.assign(static_cast<std::size_t>(k_users), db_to_linear(sweep_value));
  c.sca_tolerance = sca_tolerance;
  c.grid_step = grid_step;
  c.init_power_split = init_power_split;
  c.init_theta = init_theta;
  c.timer_constant = timer_constant;
  return c;
}

void Scenario::validate() const {
  if (sweep_values.empty()) throw ConfigError("scenario sweep has no values");
  if (strategies.empty()) throw ConfigError("scenario lists no strategies");
  if (protocols.empty()) throw ConfigError("scenario lists no protocols");
  if (trials < 1) throw ConfigError("trials must be positive");
  if (selection != "centralized" && selection != "decentralized")
    throw ConfigError(fmt::format("unknown selection '{}'", selection));
  if (sweep_kind != SweepKind::num_users && !bs_variances.empty() &&
      static_cast<int>(bs_variances.size()) != num_users)
    throw ConfigError("bs_variances must have one entry per user");
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    strategies[i].validate();
    for (std::size_t j = 0; j < i; ++j)
      if (strategies[j].kind == strategies[i].kind) throw ConfigError("scenario lists a strategy twice");
  }
  for (std::size_t i = 0; i < protocols.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (protocols[j] == protocols[i]) throw ConfigError("scenario lists a protocol twice");
  for (double v : sweep_values) {
    if (!std::isfinite(v)) throw ConfigError("sweep values must be finite");
    if (sweep_kind == SweepKind::num_users && (std::abs(v - std::round(v)) > 1e-9 || v < 2))
      throw ConfigError("user-count sweep values must be integers >= 2");
    const SystemConfig c = config_at(v);
    c.validate();
    for (auto p : protocols)
      if (p == Protocol::optimal && c.num_users > c.enumeration_guard)
        throw ConfigError(fmt::format("optimal protocol with K={} exceeds the enumeration guard K<={}",
                                      c.num_users, c.enumeration_guard));
  }
}

namespace {

template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("scenario key '{}': {}", key, e.what()));
  }
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("scenario is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");

  static const std::set<std::string> known = {
      "name", "num_users", "num_tx_antennas", "bs_variances", "user_variance", "sweep", "snr_db",
      "strategies", "protocols", "selection", "trials", "base_seed", "sca_tolerance", "grid_step",
      "init_power_split", "init_theta", "timer_constant", "record_wall_time", "packet_sizes", "output_dir"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError(fmt::format("unknown scenario key '{}'", key));

  Scenario s;
  if (j.contains("name")) s.name = get<std::string>(j, "name");
  if (j.contains("num_users")) s.num_users = get<int>(j, "num_users");
  if (j.contains("num_tx_antennas")) s.num_tx_antennas = get<int>(j, "num_tx_antennas");
  if (j.contains("bs_variances")) s.bs_variances = get<std::vector<double>>(j, "bs_variances");
  if (j.contains("user_variance")) s.user_variance = get<double>(j, "user_variance");
  if (j.contains("snr_db")) s.snr_db = get<double>(j, "snr_db");
  if (j.contains("selection")) s.selection = get<std::string>(j, "selection");
  if (j.contains("trials")) s.trials = get<int>(j, "trials");
  if (j.contains("base_seed")) s.base_seed = get<std::uint64_t>(j, "base_seed");
  if (j.contains("sca_tolerance")) s.sca_tolerance = get<double>(j, "sca_tolerance");
  if (j.contains("grid_step")) s.grid_step = get<double>(j, "grid_step");
  if (j.contains("init_power_split")) s.init_power_split = get<double>(j, "init_power_split");
  if (j.contains("init_theta")) s.init_theta = get<double>(j, "init_theta");
  if (j.contains("timer_constant")) s.timer_constant = get<double>(j, "timer_constant");
  if (j.contains("record_wall_time")) s.record_wall_time = get<bool>(j, "record_wall_time");
  if (j.contains("output_dir")) s.output_dir = get<std::string>(j, "output_dir");

  if (!j.contains("sweep")) throw ConfigError("scenario needs a 'sweep' object");
  const json& sweep = j.at("sweep");
  if (!sweep.is_object()) throw ConfigError("'sweep' must be an object with 'kind' and 'values'");
  s.sweep_kind = parse_sweep_kind(get<std::string>(sweep, "kind"));
  s.sweep_values = get<std::vector<double>>(sweep, "values");

  for (const auto& name : get<std::vector<std::string>>(j, "strategies")) {
    Strategy st;
    st.kind = parse_strategy(name);
    st.grid_step = s.grid_step;
    s.strategies.push_back(st);
  }
  for (const auto& name : get<std::vector<std::string>>(j, "protocols")) s.protocols.push_back(parse_protocol(name));

  if (j.contains("packet_sizes")) {
    const json& p = j.at("packet_sizes");
    PacketSizes ps;
    ps.rts = get<long long>(p, "rts");
    ps.cts = get<long long>(p, "cts");
    ps.flag_centralized = get<long long>(p, "flag_centralized");
    ps.flag_decentralized = get<long long>(p, "flag_decentralized");
    if (p.contains("symbol_duration")) ps.symbol_duration = get<double>(p, "symbol_duration");
    s.packet_sizes = ps;
  }

  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw OutputError(fmt::format("cannot read scenario file {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::filesystem::path resolve_output_dir(const Scenario& scenario, const std::optional<std::string>& cli_flag) {
  if (cli_flag && !cli_flag->empty()) return *cli_flag;
  if (const char* env = std::getenv("CRS_OUTPUT_DIR"); env && *env) return env;
  return scenario.output_dir;
}

}  // namespace crs::harness
