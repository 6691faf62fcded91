#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crs/baselines.hpp"
#include "crs/config.hpp"
#include "crs/relay.hpp"

namespace crs::harness {

enum class SweepKind { snr_db, num_users, relay_power_db };
enum class Protocol { optimal, one_best, half_best, one_random };

SweepKind parse_sweep_kind(std::string_view name);
std::string_view to_string(SweepKind kind);
/// Protocol names: optimal, 1-best, K/2-best, 1-random.
Protocol parse_protocol(std::string_view name);
std::string_view to_string(Protocol protocol);

/// One Monte Carlo experiment: a sweep over SNR, user count or relay power,
/// every listed strategy under every listed relaying protocol, `trials`
/// channel draws per sweep point.
struct Scenario {
  std::string name = "scenario";
  int num_users = 3;
  int num_tx_antennas = 2;
  std::vector<double> bs_variances;  // empty: 1 - (k-1)/K
  double user_variance = 1.0;
  SweepKind sweep_kind = SweepKind::snr_db;
  std::vector<double> sweep_values;
  double snr_db = 20.0;              // fixed SNR for the non-SNR sweeps
  std::vector<Strategy> strategies;
  std::vector<Protocol> protocols;
  std::string selection = "centralized";  // or "decentralized"
  int trials = 1;
  std::uint64_t base_seed = 1;
  double sca_tolerance = 1e-3;
  double grid_step = 0.1;
  double init_power_split = 0.5;
  double init_theta = 0.8;
  double timer_constant = 1.0;
  bool record_wall_time = false;
  std::optional<PacketSizes> packet_sizes;
  std::string output_dir = "out";

  void validate() const;
  /// System configuration at one sweep point.
  SystemConfig config_at(double sweep_value) const;
};

/// Parses the JSON scenario format; throws ConfigError on unknown keys,
/// wrong types or invalid values.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

struct Row {
  std::size_t sweep_index = 0;
  double sweep = 0.0;
  StrategyKind strategy = StrategyKind::crs_sca;
  Protocol protocol = Protocol::one_best;
  int trial = 0;
  double rate = 0.0;
  double theta = 1.0;
  int iterations = 0;
  std::optional<double> ms;
  std::uint64_t channel_hash = 0;
  RelayGrouping grouping;  // empty for strategies without relaying
};

struct Failure {
  double sweep = 0.0;
  StrategyKind strategy = StrategyKind::crs_sca;
  Protocol protocol = Protocol::one_best;
  int trial = 0;
  std::string message;
};

struct Aggregate {
  double sweep = 0.0;
  StrategyKind strategy = StrategyKind::crs_sca;
  Protocol protocol = Protocol::one_best;
  double mean_rate = 0.0;
  int count = 0;
  int failures = 0;
};

struct ExperimentReport {
  std::string name;
  SweepKind sweep_kind = SweepKind::snr_db;
  std::vector<Row> rows;  // successful solves, ordered by (sweep, strategy, protocol, trial)
  std::vector<Failure> failures;
  std::vector<Aggregate> aggregates;
  std::vector<std::string> overhead_lines;
};

/// (a - b) / b in percent.
double relative_gain_percent(double a, double b);

/// Mean rate of every (sweep, strategy, protocol) cell over its rows.
std::vector<Aggregate> aggregate(const std::vector<Row>& rows, const std::vector<Failure>& failures);

struct RunOptions {
  bool parallel = true;  // OpenMP over (sweep point, trial); false is the serial reference
};

ExperimentReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Fixed header: sweep,strategy,protocol,trial,rate,theta,iters,ms. The ms
/// column is empty unless wall time was recorded.
inline constexpr std::string_view kCsvHeader = "sweep,strategy,protocol,trial,rate,theta,iters,ms";
void write_csv(std::ostream& os, const ExperimentReport& report);
void emit_csv(const ExperimentReport& report, const std::filesystem::path& path);

/// Self-contained SVG line chart of mean rate versus the sweep variable.
void write_svg(std::ostream& os, const ExperimentReport& report);
void emit_plot(const ExperimentReport& report, const std::filesystem::path& path);

/// Aggregates, relative gains against NRS, failure count and overhead.
void write_summary(std::ostream& os, const ExperimentReport& report);
void emit_summary(const ExperimentReport& report, const std::filesystem::path& path);

/// One block per (sweep, trial, protocol) grouping actually used.
void emit_selection_logs(const ExperimentReport& report, const std::filesystem::path& path);

/// CLI flag, then CRS_OUTPUT_DIR, then the scenario's own setting.
std::filesystem::path resolve_output_dir(const Scenario& scenario, const std::optional<std::string>& cli_flag);

}  // namespace crs::harness
