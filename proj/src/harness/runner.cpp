#include <algorithm>
#include <chrono>
#include <exception>
#include <limits>
#include <map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "crs/errors.hpp"
#include "crs/harness.hpp"
#include "crs/relay.hpp"

namespace crs::harness {

double relative_gain_percent(double a, double b) {
  if (b == 0.0) throw ConfigError("relative gain against a zero baseline");
  return 100.0 * (a - b) / b;
}

std::vector<Aggregate> aggregate(const std::vector<Row>& rows, const std::vector<Failure>& failures) {
  // Rows arrive in report order, so the first appearance of a cell fixes its position.
  std::vector<Aggregate> out;
  std::map<std::tuple<double, int, int>, std::size_t> index;
  std::vector<double> sums;
  auto cell = [&](double sweep, StrategyKind s, Protocol p) -> std::size_t {
    const auto key = std::make_tuple(sweep, static_cast<int>(s), static_cast<int>(p));
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    out.push_back({sweep, s, p, 0.0, 0, 0});
    sums.push_back(0.0);
    index.emplace(key, out.size() - 1);
    return out.size() - 1;
  };
  for (const auto& r : rows) {
    const auto i = cell(r.sweep, r.strategy, r.protocol);
    sums[i] += r.rate;
    ++out[i].count;
  }
  for (const auto& f : failures) ++out[cell(f.sweep, f.strategy, f.protocol)].failures;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i].mean_rate = out[i].count > 0 ? sums[i] / out[i].count : std::numeric_limits<double>::quiet_NaN();
  return out;
}

namespace {

struct UnitResult {
  std::vector<Row> rows;
  std::vector<Failure> failures;
};

bool solver_failure(const std::exception& e) {
  return dynamic_cast<const SolverError*>(&e) || dynamic_cast<const SplitInfeasibleError*>(&e) ||
         dynamic_cast<const SelectionStallError*>(&e);
}

RelayGrouping heuristic_grouping(const Scenario& sc, const ChannelRealization& ch, int count) {
  return sc.selection == "decentralized" ? select_decentralized(ch, count, sc.timer_constant)
                                         : select_centralized(ch, count);
}

UnitResult run_unit(const Scenario& sc, std::size_t sweep_index, int trial, bool timed) {
  UnitResult out;
  const double sweep = sc.sweep_values[sweep_index];
  const SystemConfig config = sc.config_at(sweep);
  const std::uint64_t seed = sc.base_seed + static_cast<std::uint64_t>(trial);
  const ChannelRealization ch = generate_channels(config, seed);
  const std::uint64_t hash = ch.hash();
  const int k_users = config.num_users;

  auto timed_solve = [&](const Strategy& st, const RelayGrouping* g, std::optional<double>& ms) {
    const auto t0 = std::chrono::steady_clock::now();
    Solution s = solve_strategy(st, ch, g, config);
    if (timed) ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return s;
  };
  auto make_row = [&](const Strategy& st, Protocol p, const Solution& s, std::optional<double> ms, RelayGrouping g) {
    return Row{sweep_index, sweep, st.kind, p, trial, s.maxmin_rate, s.theta, s.iterations, ms, hash, std::move(g)};
  };

  for (const auto& st : sc.strategies) {
    if (!st.uses_relays()) {
      // Grouping plays no role, so one solve serves every protocol.
      try {
        std::optional<double> ms;
        const Solution s = timed_solve(st, nullptr, ms);
        for (auto p : sc.protocols) out.rows.push_back(make_row(st, p, s, ms, {}));
      } catch (const std::exception& e) {
        if (!solver_failure(e)) throw;
        for (auto p : sc.protocols) out.failures.push_back({sweep, st.kind, p, trial, e.what()});
      }
      continue;
    }
    for (auto p : sc.protocols) {
      try {
        std::optional<double> ms;
        RelayGrouping g;
        switch (p) {
          case Protocol::optimal: {
            const auto t0 = std::chrono::steady_clock::now();
            auto evaluate = [&](const RelayGrouping& cand) {
              try {
                return solve_strategy(st, ch, &cand, config).maxmin_rate;
              } catch (const std::exception& e) {
                if (!solver_failure(e)) throw;
                return -std::numeric_limits<double>::infinity();
              }
            };
            auto best = select_optimal(ch, evaluate, config.enumeration_guard);
            if (!std::isfinite(best.rate)) throw SolverError("every candidate grouping failed");
            g = std::move(best.grouping);
            Solution s = solve_strategy(st, ch, &g, config);
            if (timed) ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            out.rows.push_back(make_row(st, p, s, ms, std::move(g)));
            continue;
          }
          case Protocol::one_best: g = heuristic_grouping(sc, ch, 1); break;
          case Protocol::half_best: g = heuristic_grouping(sc, ch, half_relay_count(k_users)); break;
          case Protocol::one_random: g = select_random(k_users, seed ^ 0x6a09e667f3bcc908ULL); break;
        }
        const Solution s = timed_solve(st, &g, ms);
        out.rows.push_back(make_row(st, p, s, ms, std::move(g)));
      } catch (const std::exception& e) {
        if (!solver_failure(e)) throw;
        out.failures.push_back({sweep, st.kind, p, trial, e.what()});
      }
    }
  }
  return out;
}

std::vector<std::string> overhead_lines(const Scenario& sc, const std::vector<Row>& rows) {
  std::vector<std::string> lines;
  if (!sc.packet_sizes) return lines;
  const auto relaying = std::find_if(sc.strategies.begin(), sc.strategies.end(),
                                     [](const Strategy& s) { return s.uses_relays(); });
  if (relaying == sc.strategies.end()) return lines;

  struct Acc {
    OverheadScheme scheme;
    long long symbols = 0;
    double time = 0.0;
    int n = 0;
  };
  std::map<std::pair<std::size_t, int>, Acc> acc;
  for (const auto& r : rows) {
    if (r.strategy != relaying->kind) continue;
    const bool decentral = sc.selection == "decentralized" &&
                           (r.protocol == Protocol::one_best || r.protocol == Protocol::half_best);
    const auto scheme = decentral ? OverheadScheme::decentralized : OverheadScheme::centralized;
    const auto timers = decentral ? fired_timers(r.grouping) : std::vector<double>{};
    const auto k_users = static_cast<int>(r.grouping.group1.size() + r.grouping.group2.size());
    const auto rep = overhead(scheme, k_users, static_cast<int>(r.grouping.group1.size()), *sc.packet_sizes, timers);
    auto& a = acc.try_emplace({r.sweep_index, static_cast<int>(r.protocol)}, Acc{scheme}).first->second;
    a.symbols += rep.signaling_symbols;
    a.time += rep.time_units;
    ++a.n;
  }
  for (const auto& [key, a] : acc)
    lines.push_back(fmt::format("overhead sweep={:g} protocol={} scheme={} mean_signaling={:g} mean_time={:g}",
                                sc.sweep_values[key.first], to_string(static_cast<Protocol>(key.second)),
                                to_string(a.scheme), static_cast<double>(a.symbols) / a.n, a.time / a.n));
  for (std::size_t i = 0; i < sc.sweep_values.size(); ++i) {
    const auto rep = overhead(OverheadScheme::none, sc.config_at(sc.sweep_values[i]).num_users, 0, *sc.packet_sizes);
    lines.push_back(fmt::format("overhead sweep={:g} protocol=none scheme=none mean_signaling={} mean_time={:g}",
                                sc.sweep_values[i], rep.signaling_symbols, rep.time_units));
  }
  return lines;
}

}  // namespace

ExperimentReport run_scenario(const Scenario& scenario, const RunOptions& options) {
  scenario.validate();
  const auto points = scenario.sweep_values.size();
  const auto trials = static_cast<std::size_t>(scenario.trials);
  const auto units = static_cast<long>(points * trials);
  std::vector<UnitResult> results(static_cast<std::size_t>(units));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(units));

  // Trials are independent; each unit owns its channels and solver state.
#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (long u = 0; u < units; ++u) {
    const auto uu = static_cast<std::size_t>(u);
    try {
      results[uu] = run_unit(scenario, uu / trials, static_cast<int>(uu % trials), scenario.record_wall_time);
    } catch (...) {
      errors[uu] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentReport report;
  report.name = scenario.name;
  report.sweep_kind = scenario.sweep_kind;
  for (auto& r : results) {
    std::move(r.rows.begin(), r.rows.end(), std::back_inserter(report.rows));
    std::move(r.failures.begin(), r.failures.end(), std::back_inserter(report.failures));
  }

  auto position = [](const auto& list, auto value) {
    for (std::size_t i = 0; i < list.size(); ++i)
      if (list[i] == value) return i;
    return list.size();
  };
  std::vector<StrategyKind> kinds;
  for (const auto& s : scenario.strategies) kinds.push_back(s.kind);
  auto key = [&](const Row& r) {
    return std::make_tuple(r.sweep_index, position(kinds, r.strategy), position(scenario.protocols, r.protocol), r.trial);
  };
  std::sort(report.rows.begin(), report.rows.end(), [&](const Row& a, const Row& b) { return key(a) < key(b); });

  report.aggregates = aggregate(report.rows, report.failures);
  report.overhead_lines = overhead_lines(scenario, report.rows);
  if (!report.failures.empty())
    spdlog::warn("{} solve(s) failed and were excluded from the report", report.failures.size());
  return report;
}

}  // namespace crs::harness
