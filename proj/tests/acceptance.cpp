// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "conic_instances.hpp"
#include "crs/baselines.hpp"
#include "crs/errors.hpp"
#include "crs/relay.hpp"
#include "crs/sca.hpp"
#include "support.hpp"

using namespace crs;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

const std::vector<double> kDisparity = {1.0, 0.3, 0.1};

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

Verdict phi_bound() {
  GaussianSource rng(101);
  double worst_excess = -1e300, worst_tight = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double th = rng.uniform(), a = 40.0 * rng.uniform();
    const double thn = rng.uniform(), an = 40.0 * rng.uniform();
    worst_excess = std::max(worst_excess, phi_lower_bound(th, a, thn, an) - th * a);
    worst_tight = std::max(worst_tight, std::abs(phi_lower_bound(thn, an, thn, an) - thn * an));
  }
  return {worst_excess <= 0.0 && worst_tight <= 1e-12,
          fmt::format("max(Phi - theta*alpha) = {:.3e}, max tightness error {:.3e}", worst_excess, worst_tight)};
}

PrecoderSet random_precoders(GaussianSource& rng, int k, int nt) {
  auto p = PrecoderSet::zeros(k, nt);
  auto fill = [&](Eigen::VectorXcd& v) {
    for (int i = 0; i < nt; ++i) v(i) = rng.complex_normal(1.0 + 9.0 * rng.uniform());
  };
  fill(p.common);
  for (auto& v : p.privates) fill(v);
  return p;
}

Verdict dc_restriction() {
  GaussianSource rng(202);
  const auto cfg = SystemConfig::standard(3, 2, 10.0, kDisparity);
  double worst = 1e300, worst_tight = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const auto ch = generate_channels(cfg, 50000 + static_cast<std::uint64_t>(i % 500));
    const auto p = random_precoders(rng, 3, 2);
    const auto pn = random_precoders(rng, 3, 2);
    const int k = static_cast<int>(rng.uniform() * 3.0);
    const auto stream = rng.uniform() < 0.5 ? Stream::private_stream : Stream::common_stream;
    const double rho = 1e-3 + 20.0 * rng.uniform();
    const double rhon = 1e-3 + 20.0 * rng.uniform();
    const double lin = dc_linearized_lhs(ch, p, rho, pn, rhon, k, stream);
    const double orig = dc_original_lhs(ch, p, rho, k, stream);
    worst = std::min(worst, (lin - orig) / std::max(1.0, std::abs(orig)));
    const double at = dc_linearized_lhs(ch, pn, rhon, pn, rhon, k, stream);
    const double at_orig = dc_original_lhs(ch, pn, rhon, k, stream);
    worst_tight = std::max(worst_tight, std::abs(at - at_orig));
  }
  return {worst >= -1e-12 && worst_tight <= 1e-10,
          fmt::format("min relative (linearized - original) = {:.3e}, max gap at expansion {:.3e}", worst,
                      worst_tight)};
}

struct ScaRun {
  ChannelRealization channels;
  RelayGrouping grouping;
  SystemConfig config;
  Solution solution;
  bool failed = false;
};

// Shared by the monotonicity and Proposition 1 criteria.
const std::vector<ScaRun>& sca_runs() {
  static const std::vector<ScaRun> runs = [] {
    std::vector<ScaRun> out;
    for (int i = 0; i < 50; ++i) {
      const int nt = i % 2 ? 4 : 2;
      const double snr = (i / 2) % 2 ? 20.0 : 5.0;
      ScaRun r;
      r.config = SystemConfig::standard(3, nt, snr, kDisparity);
      r.channels = generate_channels(r.config, 7000 + static_cast<std::uint64_t>(i));
      r.grouping = select_centralized(r.channels, 1);
      try {
        r.solution = sca_solve(r.channels, &r.grouping, r.config);
      } catch (const SolverError&) {
        r.failed = true;
      }
      out.push_back(std::move(r));
    }
    return out;
  }();
  return runs;
}

Verdict sca_monotone() {
  const auto start = std::chrono::steady_clock::now();
  const auto& runs = sca_runs();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  int monotone = 0, converged = 0;
  double worst_drop = 0.0;
  for (const auto& r : runs) {
    if (r.failed) continue;
    bool ok = true;
    for (std::size_t i = 1; i < r.solution.history.size(); ++i) {
      const double drop = r.solution.history[i - 1] - r.solution.history[i];
      worst_drop = std::max(worst_drop, drop);
      ok = ok && drop <= 1e-8;
    }
    monotone += ok;
    converged += r.solution.converged && r.solution.iterations <= 100;
  }
  const int n = static_cast<int>(runs.size());
  return {monotone == n && converged >= 0.95 * n && seconds < 1200.0,
          fmt::format("monotone {}/{}, converged {}/{}, worst drop {:.2e}, {:.1f} s", monotone, n, converged, n,
                      worst_drop, seconds)};
}

Verdict proposition1() {
  int interior = 0, equal = 0, rule_on_equal = 0;
  for (const auto& r : sca_runs()) {
    if (r.failed || !r.solution.converged) continue;
    const auto rep = proposition1_check(r.solution, r.channels, r.grouping, r.config.relay_powers,
                                        r.config.bs_power, 5e-2);
    if (rep.status == CheckStatus::not_applicable) continue;
    ++interior;
    if (rep.equality) {
      ++equal;
      rule_on_equal += rep.grouping_rule;
    }
  }
  return {interior > 0 && equal >= 0.9 * interior && rule_on_equal == equal,
          fmt::format("interior solutions {}, equality {}/{}, grouping rule {}/{}", interior, equal, interior,
                      rule_on_equal, equal)};
}

Verdict strategy_ordering() {
  const auto cfg = SystemConfig::standard(3, 2, 20.0, kDisparity);
  std::vector<double> crs, nrs, sdma;
  int crs_ok = 0, nrs_ok = 0;
  for (int s = 1; s <= 50; ++s) {
    const auto ch = generate_channels(cfg, static_cast<std::uint64_t>(s));
    const auto g = select_centralized(ch, 1);
    crs.push_back(sca_solve(ch, &g, cfg).maxmin_rate);
    nrs.push_back(solve_nrs(ch, cfg).maxmin_rate);
    sdma.push_back(solve_sdma(ch, cfg).maxmin_rate);
    crs_ok += crs.back() >= nrs.back() - 1e-3;
    nrs_ok += nrs.back() >= sdma.back() - 1e-3;
  }
  const double gain = 100.0 * (mean(crs) - mean(nrs)) / mean(nrs);
  return {crs_ok >= 48 && nrs_ok >= 48 && gain >= 50.0,
          fmt::format("CRS>=NRS {}/50, NRS>=SDMA {}/50, means CRS {:.4f} NRS {:.4f} SDMA {:.4f}, gain {:.1f}% "
                      "(needs >= 50%)",
                      crs_ok, nrs_ok, mean(crs), mean(nrs), mean(sdma), gain)};
}

Verdict sca_vs_grid() {
  const auto cfg = SystemConfig::standard(3, 4, 20.0, kDisparity);
  std::vector<double> sca, grid;
  bool runs_ok = true;
  for (int s = 1; s <= 25; ++s) {
    const auto ch = generate_channels(cfg, 300 + static_cast<std::uint64_t>(s));
    const auto g = select_centralized(ch, 1);
    const auto a = sca_solve(ch, &g, cfg);
    const auto b = solve_crs_grid(ch, g, cfg, 0.1);
    sca.push_back(a.maxmin_rate);
    grid.push_back(b.maxmin_rate);
    runs_ok = runs_ok && a.sca_runs == 1 && b.sca_runs == 10;
  }
  return {mean(sca) >= 0.98 * mean(grid) && runs_ok,
          fmt::format("mean SCA {:.4f} vs grid {:.4f} (ratio {:.4f}), solve counts 1 vs 10: {}", mean(sca),
                      mean(grid), mean(sca) / mean(grid), runs_ok ? "yes" : "no")};
}

Verdict relay_protocols() {
  const auto cfg = SystemConfig::standard(3, 2, 20.0, kDisparity);
  std::vector<double> best, optimal, random;
  int identical = 0;
  for (int s = 1; s <= 25; ++s) {
    const auto ch = generate_channels(cfg, 900 + static_cast<std::uint64_t>(s));
    const auto central = select_centralized(ch, 1);
    const auto decentral = select_decentralized(ch, 1, cfg.timer_constant);
    identical += central.group1 == decentral.group1 && central.group2 == decentral.group2;
    const auto evaluate = [&](const RelayGrouping& g) { return sca_solve(ch, &g, cfg).maxmin_rate; };
    best.push_back(evaluate(central));
    optimal.push_back(select_optimal(ch, evaluate).rate);
    random.push_back(evaluate(select_random(3, 900 + static_cast<std::uint64_t>(s))));
  }
  return {mean(best) >= 0.95 * mean(optimal) && identical == 25 && mean(best) > mean(random),
          fmt::format("1-best {:.4f} = {:.1f}% of optimal {:.4f}, 1-random {:.4f}, decentralized identical {}/25",
                      mean(best), 100.0 * mean(best) / mean(optimal), mean(optimal), mean(random), identical)};
}

Verdict closed_forms() {
  using test::make_channels;
  using test::vec;
  double rate_err = 0.0;
  {
    const auto ch = make_channels({vec({1}), vec({1})});
    auto p = PrecoderSet::zeros(2, 1);
    p.privates[0](0) = 1.0;
    rate_err = std::max(rate_err, std::abs(private_rate_direct(ch, p, 0, 1.0) - 1.0));
    p.privates[0](0) = std::sqrt(3.0);
    p.privates[1](0) = 1.0;
    p.common(0) = 10.0;
    rate_err = std::max(rate_err, std::abs(private_rate_direct(ch, p, 0, 1.0) - std::log2(2.5)));
    rate_err = std::max(rate_err, std::abs(private_rate_direct(ch, p, 0, 0.0)));
    auto q = PrecoderSet::zeros(2, 1);
    q.common(0) = std::sqrt(3.0);
    q.privates[0](0) = 1.0;
    rate_err = std::max(rate_err, std::abs(common_rate_direct(ch, q, 0, 1.0) - std::log2(2.5)));
    rate_err = std::max(rate_err, std::abs(common_rate_direct(ch, q, 0, 0.5) - 0.5 * std::log2(2.5)));
  }
  {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(3, 3);
    g(0, 1) = std::sqrt(3.0);
    g(2, 0) = 1.0;
    g(2, 1) = std::sqrt(2.0);
    const auto ch = make_channels({vec({1}), vec({1}), vec({1})}, g);
    const std::vector<double> powers = {1.0, 1.0, 1.0};
    const std::vector<int> one = {1}, two = {0, 1};
    rate_err = std::max(rate_err, std::abs(common_rate_coop(ch, one, powers, 0, 0.5) - 1.0));
    rate_err = std::max(rate_err, std::abs(common_rate_coop(ch, two, powers, 2, 0.25) - 0.75 * 2.0));
    rate_err = std::max(rate_err, std::abs(theta_crossover(2.0, 1.0, 3.0) - 0.75));
  }
  int conic_ok = 0, conic_total = 0;
  for (const auto& inst : test::hand_instances()) {
    ++conic_total;
    const auto s = conic::solve(inst.problem);
    conic_ok += s.ok() && std::abs(s.objective_value - inst.optimum) <= 1e-5 * std::max(1.0, std::abs(inst.optimum));
  }
  auto cfg = SystemConfig::standard(2, 2, 0.0, {1.0, 1.0});
  cfg.bs_power = 2.0;
  const double orth = solve_nrs(make_channels({vec({1, 0}), vec({0, 1})}), cfg).maxmin_rate;
  return {rate_err <= 1e-12 && conic_total >= 20 && conic_ok == conic_total && std::abs(orth - 1.0) <= 1e-3,
          fmt::format("rate error {:.2e}, conic {}/{}, orthogonal max-min {:.6f}", rate_err, conic_ok, conic_total,
                      orth)};
}

Verdict determinism() {
  const auto base = std::filesystem::temp_directory_path() / "crs_acceptance_determinism";
  std::filesystem::remove_all(base);
  std::string text[2];
  for (int i = 0; i < 2; ++i) {
    const auto dir = base / std::to_string(i);
    const auto cmd = fmt::format("\"{}\" run \"{}/smoke.json\" -o \"{}\" > /dev/null 2>&1", CRS_CLI_PATH,
                                 CRS_SCENARIO_DIR, dir.string());
    if (std::system(cmd.c_str()) != 0) return {false, "CLI run failed"};
    std::ifstream in(dir / "results.csv", std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    text[i] = buf.str();
  }
  const bool same = !text[0].empty() && text[0] == text[1];
  return {same, fmt::format("{} bytes, identical: {}", text[0].size(), same ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Verdict()>>> criteria = {
      {1, {"Phi lower bound", phi_bound}},
      {2, {"DC restriction", dc_restriction}},
      {3, {"SCA monotonicity", sca_monotone}},
      {4, {"Proposition 1 equality", proposition1}},
      {5, {"strategy ordering", strategy_ordering}},
      {6, {"SCA vs grid", sca_vs_grid}},
      {7, {"relay protocols", relay_protocols}},
      {8, {"closed-form oracles", closed_forms}},
      {9, {"CLI determinism", determinism}},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& [id, entry] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = entry.second();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("criterion {} {}: {} ({}) [{:.1f} s]\n", id, entry.first, v.pass ? "PASS" : "FAIL", v.detail, s);
    std::fflush(stdout);
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
