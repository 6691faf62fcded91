// crs: command-line driver.
//
//   crs run SCENARIO.json [--output-dir DIR] [--serial] [--selection-log]
//   crs prop-check [--suite NAME] [--instances N] [--samples N] [--seed S]
//   crs bench [--users K] [--antennas N] [--snr DB] [--strategy S] [--repeats R]
//             [--trace FILE] [--dump-problem FILE]
//
// Exit codes: 0 success, 2 configuration, 3 I/O, 4 solver, 5 property failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "crs/baselines.hpp"
#include "crs/errors.hpp"
#include "crs/harness.hpp"
#include "crs/properties.hpp"
#include "crs/relay.hpp"
#include "crs/sca.hpp"

namespace {

enum Exit { ok = 0, config_error = 2, io_error = 3, solver_error = 4, property_failure = 5 };

int cmd_run(const std::string& scenario_path, const std::optional<std::string>& out_dir, bool serial,
            bool selection_log) {
  using namespace crs::harness;
  const Scenario sc = load_scenario(scenario_path);
  const auto dir = resolve_output_dir(sc, out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentReport report = run_scenario(sc, RunOptions{!serial});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  emit_csv(report, dir / "results.csv");
  emit_plot(report, dir / "plot.svg");
  emit_summary(report, dir / "summary.txt");
  if (selection_log) emit_selection_logs(report, dir / "selection.log");
  fmt::print("{} rows, {} failures in {:.1f} s; wrote {}\n", report.rows.size(), report.failures.size(), secs,
             (dir / "results.csv").string());
  return ok;
}

int cmd_prop_check(const crs::PropertyOptions& opts) {
  const auto results = crs::run_property_suites(opts);
  if (results.empty()) {
    fmt::print(stderr, "no suite matches '{}'\n", opts.filter);
    return config_error;
  }
  bool all = true;
  for (const auto& r : results) {
    fmt::print("{} {} ({:.2f} s) {}\n", r.passed ? "PASS" : "FAIL", r.name, r.seconds, r.detail);
    all = all && r.passed;
  }
  return all ? ok : property_failure;
}

struct BenchArgs {
  int users = 3;
  int antennas = 2;
  double snr = 20.0;
  std::string strategy = "CRS-SCA";
  int repeats = 5;
  std::uint64_t seed = 1;
  std::string trace;
  std::string dump;
};

int cmd_bench(const BenchArgs& a) {
  std::vector<double> variances;
  for (int k = 0; k < a.users; ++k) variances.push_back(1.0 - static_cast<double>(k) / a.users);
  const auto cfg = crs::SystemConfig::standard(a.users, a.antennas, a.snr, variances);
  crs::Strategy st;
  st.kind = crs::parse_strategy(a.strategy);
  st.grid_step = cfg.grid_step;

  double total = 0.0, best = 1e300;
  for (int r = 0; r < a.repeats; ++r) {
    const auto ch = crs::generate_channels(cfg, a.seed + static_cast<std::uint64_t>(r));
    const auto g = crs::select_centralized(ch, 1);
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = crs::solve_strategy(st, ch, st.uses_relays() ? &g : nullptr, cfg);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    total += ms;
    best = std::min(best, ms);
    fmt::print("seed={} rate={:.6f} theta={:.4f} iters={} solves={} ms={:.2f}\n", a.seed + r, s.maxmin_rate, s.theta,
               s.iterations, s.subproblem_solves, ms);
    if (r == 0 && !a.trace.empty()) {
      std::ofstream out(a.trace);
      if (!out) throw crs::OutputError("cannot write " + a.trace);
      crs::write_trace_csv(out, s);
    }
    if (r == 0 && !a.dump.empty()) {
      const crs::ScaMode mode = st.kind == crs::StrategyKind::sdma  ? crs::ScaMode{1.0, false}
                                : st.kind == crs::StrategyKind::nrs ? crs::ScaMode{1.0, true}
                                : st.kind == crs::StrategyKind::ers ? crs::ScaMode{0.5, true}
                                                                    : crs::ScaMode{};
      const auto* grouping = st.uses_relays() ? &g : nullptr;
      const auto state = crs::initialize(ch, grouping, cfg, mode);
      std::ofstream out(a.dump);
      if (!out) throw crs::OutputError("cannot write " + a.dump);
      crs::assemble_subproblem(state, ch, grouping, cfg, mode).problem.dump(out);
    }
  }
  fmt::print("strategy={} K={} Nt={} snr={} mean_ms={:.2f} min_ms={:.2f}\n", a.strategy, a.users, a.antennas, a.snr,
             total / a.repeats, best);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative rate-splitting max-min fairness toolkit"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  auto* run = app.add_subcommand("run", "Run a scenario file and write CSV, plot and summary");
  std::string scenario;
  std::optional<std::string> out_dir;
  bool serial = false, selection_log = false;
  run->add_option("scenario", scenario, "Scenario JSON file")->required();
  run->add_option("-o,--output-dir", out_dir, "Output directory (overrides CRS_OUTPUT_DIR)");
  run->add_flag("--serial", serial, "Run trials serially (reference path)");
  run->add_flag("--selection-log", selection_log, "Also write selection.log");

  auto* prop = app.add_subcommand("prop-check", "Run the invariant suites");
  crs::PropertyOptions popts;
  prop->add_option("--suite", popts.filter, "Only suites whose name contains this");
  prop->add_option("--instances", popts.instances, "Solver-backed instances per suite")->check(CLI::PositiveNumber);
  prop->add_option("--samples", popts.samples, "Samples for closed-form suites")->check(CLI::PositiveNumber);
  prop->add_option("--seed", popts.seed, "Base seed");
  bool list = false;
  prop->add_flag("--list", list, "List suite names and exit");

  auto* bench = app.add_subcommand("bench", "Time single solves");
  BenchArgs b;
  bench->add_option("--users", b.users)->check(CLI::Range(2, 16));
  bench->add_option("--antennas", b.antennas)->check(CLI::PositiveNumber);
  bench->add_option("--snr", b.snr, "Transmit SNR in dB");
  bench->add_option("--strategy", b.strategy, "CRS-SCA, CRS-grid, ERS, NRS or SDMA");
  bench->add_option("--repeats", b.repeats)->check(CLI::PositiveNumber);
  bench->add_option("--seed", b.seed);
  bench->add_option("--trace", b.trace, "Write the first solve's iteration trace as CSV");
  bench->add_option("--dump-problem", b.dump, "Write the first convex subproblem as text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : config_error;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

  try {
    if (*run) return cmd_run(scenario, out_dir, serial, selection_log);
    if (*prop) {
      if (list) {
        for (const auto& n : crs::property_suite_names()) fmt::print("{}\n", n);
        return ok;
      }
      return cmd_prop_check(popts);
    }
    if (*bench) return cmd_bench(b);
  } catch (const crs::ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return config_error;
  } catch (const crs::OutputError& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return io_error;
  } catch (const crs::SolverError& e) {
    fmt::print(stderr, "solver error: {}\n", e.what());
    return solver_error;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return ok;
}
