#include "crs/properties.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "crs/baselines.hpp"
#include "crs/channel.hpp"
#include "crs/conic.hpp"
#include "crs/errors.hpp"
#include "crs/rates.hpp"
#include "crs/relay.hpp"
#include "crs/sca.hpp"

namespace crs {

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

using Suite = std::function<Outcome(const PropertyOptions&)>;

PrecoderSet random_precoders(GaussianSource& rng, int k_users, int nt, double power) {
  PrecoderSet p = PrecoderSet::zeros(k_users, nt);
  auto fill = [&](Eigen::VectorXcd& v) {
    for (int i = 0; i < nt; ++i) v(i) = rng.complex_normal(1.0);
  };
  fill(p.common);
  for (auto& v : p.privates) fill(v);
  const double scale = std::sqrt(power * rng.uniform() / p.total_power());
  p.common *= scale;
  for (auto& v : p.privates) v *= scale;
  return p;
}

SystemConfig random_config(GaussianSource& rng, int k_users, int nt) {
  std::vector<double> var;
  for (int k = 0; k < k_users; ++k) var.push_back(0.1 + 0.9 * rng.uniform());
  return SystemConfig::standard(k_users, nt, 20.0 * rng.uniform(), var);
}

RelayGrouping random_grouping(GaussianSource& rng, int k_users) {
  const auto sets = enumerate_relay_sets(k_users);
  const auto i = std::min(sets.size() - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(sets.size())));
  return RelayGrouping::from_relays(sets[i], k_users);
}

Outcome channel_determinism(const PropertyOptions& o) {
  for (int i = 0; i < o.instances; ++i) {
    const auto cfg = SystemConfig::standard(3, 2, 10.0, {1.0, 0.3, 0.1});
    const auto a = generate_channels(cfg, o.seed + static_cast<std::uint64_t>(i));
    const auto b = generate_channels(cfg, o.seed + static_cast<std::uint64_t>(i));
    if (a.hash() != b.hash()) return {false, fmt::format("seed {} produced different channels", o.seed + i)};
  }
  return {true, fmt::format("{} seeds reproduced", o.instances)};
}

Outcome channel_moments(const PropertyOptions& o) {
  const std::vector<double> var = {1.0, 0.3, 0.1};
  const auto cfg = SystemConfig::standard(3, 2, 0.0, var);
  const int draws = std::max(10000, o.samples / 10);
  std::vector<double> re2(3, 0.0);
  for (int d = 0; d < draws; ++d) {
    const auto ch = generate_channels(cfg, o.seed * 1000003ULL + static_cast<std::uint64_t>(d));
    for (int k = 0; k < 3; ++k)
      for (int a = 0; a < 2; ++a) re2[static_cast<std::size_t>(k)] += std::pow(ch.bs_channels[static_cast<std::size_t>(k)](a).real(), 2);
  }
  for (int k = 0; k < 3; ++k) {
    const double est = re2[static_cast<std::size_t>(k)] / (2.0 * draws);
    const double want = var[static_cast<std::size_t>(k)] / 2.0;
    if (std::abs(est - want) > 0.05 * want)
      return {false, fmt::format("user {}: real-part variance {} vs {}", k, est, want)};
  }
  return {true, fmt::format("{} draws within 5%", draws)};
}

Outcome rates_decomposition(const PropertyOptions& o) {
  GaussianSource rng(o.seed);
  const int n = std::max(100, o.samples / 100);
  for (int i = 0; i < n; ++i) {
    const int k_users = 2 + static_cast<int>(rng.uniform() * 3);
    const auto cfg = random_config(rng, k_users, 2);
    const auto ch = generate_channels(cfg, o.seed + static_cast<std::uint64_t>(i));
    const auto g = random_grouping(rng, k_users);
    Solution s;
    s.precoders = random_precoders(rng, k_users, 2, cfg.bs_power);
    s.theta = rng.uniform();
    s.common_split.assign(static_cast<std::size_t>(k_users), 0.0);
    const auto b = evaluate_solution(ch, &g, cfg.relay_powers, cfg.bs_power, s);
    double direct_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < k_users; ++k) {
      double r = common_rate_direct(ch, s.precoders, k, s.theta);
      if (!g.is_relay(k)) r += common_rate_coop(ch, g.group1, cfg.relay_powers, k, s.theta);
      direct_min = std::min(direct_min, r);
    }
    if (std::abs(direct_min - b.achievable_common) > 1e-12 * std::max(1.0, direct_min))
      return {false, fmt::format("instance {}: {} vs {}", i, b.achievable_common, direct_min)};
  }
  return {true, fmt::format("{} random instances", n)};
}

Outcome rates_theta_linearity(const PropertyOptions& o) {
  GaussianSource rng(o.seed + 1);
  const int n = std::max(100, o.samples / 100);
  for (int i = 0; i < n; ++i) {
    const auto cfg = random_config(rng, 3, 2);
    const auto ch = generate_channels(cfg, o.seed + static_cast<std::uint64_t>(i));
    const auto p = random_precoders(rng, 3, 2, cfg.bs_power);
    const double th = rng.uniform();
    const int k = static_cast<int>(rng.uniform() * 3);
    const std::vector<int> relays = {(k + 1) % 3};
    const double a = private_rate_direct(ch, p, k, th), a1 = private_rate_direct(ch, p, k, 1.0);
    const double c = common_rate_direct(ch, p, k, th), c1 = common_rate_direct(ch, p, k, 1.0);
    const double q = common_rate_coop(ch, relays, cfg.relay_powers, k, th);
    const double q0 = common_rate_coop(ch, relays, cfg.relay_powers, k, 0.0);
    if (std::abs(a - th * a1) > 1e-12 * std::max(1.0, a1) || std::abs(c - th * c1) > 1e-12 * std::max(1.0, c1) ||
        std::abs(q - (1.0 - th) * q0) > 1e-12 * std::max(1.0, q0))
      return {false, fmt::format("instance {} is not linear in the time fraction", i)};
  }
  return {true, fmt::format("{} random instances", n)};
}

Outcome rates_coop_monotone(const PropertyOptions& o) {
  GaussianSource rng(o.seed + 2);
  const int n = std::max(100, o.samples / 100);
  for (int i = 0; i < n; ++i) {
    auto cfg = random_config(rng, 3, 2);
    auto ch = generate_channels(cfg, o.seed + static_cast<std::uint64_t>(i));
    const std::vector<int> relays = {1, 2};
    const double th = rng.uniform();
    const double base = common_rate_coop(ch, relays, cfg.relay_powers, 0, th);
    auto more_power = cfg.relay_powers;
    more_power[1] *= 1.0 + rng.uniform();
    const double powered = common_rate_coop(ch, relays, more_power, 0, th);
    ch.user_channels(0, 2) *= 1.0 + rng.uniform();
    const double stronger = common_rate_coop(ch, relays, cfg.relay_powers, 0, th);
    if (powered < base || stronger < base) return {false, fmt::format("instance {} decreased", i)};
  }
  return {true, fmt::format("{} random instances", n)};
}

Outcome rates_sic_structure(const PropertyOptions& o) {
  GaussianSource rng(o.seed + 3);
  const int n = std::max(100, o.samples / 100);
  for (int i = 0; i < n; ++i) {
    const auto cfg = random_config(rng, 3, 2);
    const auto ch = generate_channels(cfg, o.seed + static_cast<std::uint64_t>(i));
    auto p = random_precoders(rng, 3, 2, cfg.bs_power);
    const int k = i % 3;
    const double priv = private_sinr(ch, p, k);
    const double common = common_sinr(ch, p, k);
    const double gain = std::norm(ch.bs_channels[static_cast<std::size_t>(k)].dot(p.common));
    p.common *= 2.0;
    const double priv2 = private_sinr(ch, p, k);
    const double common2 = common_sinr(ch, p, k);
    // Common power affects only the common numerator: SINR scales by 4 exactly.
    if (priv2 != priv || (gain > 0.0 && std::abs(common2 - 4.0 * common) > 1e-12 * std::max(1.0, common2)))
      return {false, fmt::format("instance {}: common power leaked into a denominator", i)};
  }
  return {true, fmt::format("{} random instances", n)};
}

Outcome relay_partition_and_equivalence(const PropertyOptions& o) {
  GaussianSource rng(o.seed + 4);
  const int n = std::max(100, o.instances * 10);
  for (int i = 0; i < n; ++i) {
    const int k_users = 2 + static_cast<int>(rng.uniform() * 5);
    const auto cfg = random_config(rng, k_users, 2);
    const auto ch = generate_channels(cfg, o.seed + static_cast<std::uint64_t>(i));
    for (int count = 1; count < k_users; ++count) {
      const auto c = select_centralized(ch, count);
      const auto d = select_decentralized(ch, count, 1.0 + 99.0 * rng.uniform());
      c.validate(k_users);
      d.validate(k_users);
      if (c.group1 != d.group1) return {false, fmt::format("instance {} count {}: selections differ", i, count)};
    }
    select_random(k_users, o.seed + static_cast<std::uint64_t>(i)).validate(k_users);
  }
  return {true, fmt::format("{} random instances, every relay count", n)};
}

Outcome phi_bound(const PropertyOptions& o) {
  GaussianSource rng(o.seed + 5);
  for (int i = 0; i < o.samples; ++i) {
    const double th = 1.0 - rng.uniform(), a = 40.0 * rng.uniform();
    const double thn = 1.0 - rng.uniform(), an = 40.0 * rng.uniform();
    if (phi_lower_bound(th, a, thn, an) > th * a + 1e-12 * std::max(1.0, th * a))
      return {false, fmt::format("bound exceeded at ({}, {}) around ({}, {})", th, a, thn, an)};
    if (std::abs(phi_lower_bound(thn, an, thn, an) - thn * an) > 1e-12)
      return {false, fmt::format("not tight at ({}, {})", thn, an)};
  }
  return {true, fmt::format("{} samples", o.samples)};
}

Outcome dc_restriction(const PropertyOptions& o) {
  GaussianSource rng(o.seed + 6);
  const auto cfg = SystemConfig::standard(3, 2, 10.0, {1.0, 0.3, 0.1});
  for (int i = 0; i < o.samples; ++i) {
    const auto ch = generate_channels(cfg, o.seed + static_cast<std::uint64_t>(i % 997));
    const auto p = random_precoders(rng, 3, 2, cfg.bs_power);
    const auto pn = random_precoders(rng, 3, 2, cfg.bs_power);
    const double rho = 1e-3 + 50.0 * rng.uniform(), rho_n = 1e-3 + 50.0 * rng.uniform();
    const int k = i % 3;
    const auto stream = i % 2 ? Stream::common_stream : Stream::private_stream;
    const double lin = dc_linearized_lhs(ch, p, rho, pn, rho_n, k, stream);
    const double orig = dc_original_lhs(ch, p, rho, k, stream);
    if (lin < orig - 1e-9 * std::max(1.0, std::abs(orig)))
      return {false, fmt::format("sample {}: linearized {} below original {}", i, lin, orig)};
    const double at_lin = dc_linearized_lhs(ch, pn, rho_n, pn, rho_n, k, stream);
    const double at_orig = dc_original_lhs(ch, pn, rho_n, k, stream);
    if (std::abs(at_lin - at_orig) > 1e-10 * std::max(1.0, std::abs(at_orig)))
      return {false, fmt::format("sample {}: not tight at the expansion point", i)};
  }
  return {true, fmt::format("{} samples", o.samples)};
}

Outcome conic_audit(const PropertyOptions& o) {
  // Random box-and-ball programs: maximize c'x over ||x|| <= r, x <= u.
  GaussianSource rng(o.seed + 7);
  for (int i = 0; i < o.instances * 5; ++i) {
    conic::ConicProblem p;
    const int n = 2 + i % 4;
    const auto x = p.add_real("x", n);
    const double r = 0.5 + 2.0 * rng.uniform();
    std::vector<conic::AffineExpr> u;
    conic::AffineExpr obj;
    for (int j = 0; j < n; ++j) {
      u.push_back(p.var(x, j));
      obj += rng.normal() * p.var(x, j);
      p.add_linear(p.var(x, j) - (0.2 + rng.uniform()));
    }
    p.add_soc(u, r);
    p.maximize(obj);
    const auto a = conic::solve(p);
    const auto b = conic::solve(p);
    if (!a.ok()) return {false, fmt::format("instance {}: {}", i, conic::to_string(a.status))};
    if (p.max_violation(a.values) > 1e-6) return {false, fmt::format("instance {}: violation {}", i, p.max_violation(a.values))};
    if (a.status != b.status || std::abs(a.objective_value - b.objective_value) > 1e-9)
      return {false, fmt::format("instance {}: repeated solve differs", i)};
  }
  return {true, fmt::format("{} random programs audited", o.instances * 5)};
}

Outcome sca_iteration(const PropertyOptions& o) {
  // Monotone history, audit against the independent evaluator, and the inner
  // approximation checked on one subproblem per instance.
  GaussianSource rng(o.seed + 8);
  for (int i = 0; i < o.instances; ++i) {
    const auto cfg = SystemConfig::standard(3, i % 2 ? 4 : 2, i % 3 ? 20.0 : 5.0, {1.0, 0.3, 0.1});
    const auto ch = generate_channels(cfg, o.seed + 100 + static_cast<std::uint64_t>(i));
    const auto g = select_centralized(ch, 1);
    const auto s = sca_solve(ch, &g, cfg);
    for (std::size_t n = 1; n < s.history.size(); ++n)
      if (s.history[n] < s.history[n - 1] - 1e-8)
        return {false, fmt::format("instance {} decreased at iteration {}", i, n)};
    const auto audit = evaluate_solution(ch, &g, cfg.relay_powers, cfg.bs_power, s);
    if (std::abs(audit.maxmin - s.maxmin_rate) > 1e-4)
      return {false, fmt::format("instance {}: objective {} vs evaluated {}", i, s.maxmin_rate, audit.maxmin)};

    const auto state = initialize(ch, &g, cfg);
    const auto sp = assemble_subproblem(state, ch, &g, cfg);
    const auto sol = conic::solve(sp.problem);
    if (!sol.ok()) return {false, fmt::format("instance {}: first subproblem {}", i, conic::to_string(sol.status))};
    Solution probe;
    probe.precoders = PrecoderSet::zeros(3, cfg.num_tx_antennas);
    probe.precoders.common = sp.power_scale * sol.complex_block(sp.problem, sp.common);
    for (int k = 0; k < 3; ++k)
      probe.precoders.privates[static_cast<std::size_t>(k)] = sp.power_scale * sol.complex_block(sp.problem, sp.privates[static_cast<std::size_t>(k)]);
    const double th = sol.value(sp.problem, *sp.theta);
    const double t = sol.value(sp.problem, sp.t);
    const auto alpha = sol.real_block(sp.problem, sp.alpha);
    const auto alpha_c = sol.real_block(sp.problem, *sp.alpha_common);
    const auto rho = sol.real_block(sp.problem, sp.rho);
    const auto rho_c = sol.real_block(sp.problem, *sp.rho_common);
    const auto c = sol.real_block(sp.problem, *sp.split);
    constexpr double tol = 1e-7;
    for (int k = 0; k < 3; ++k) {
      if (private_sinr(ch, probe.precoders, k) < rho(k) - tol || common_sinr(ch, probe.precoders, k) < rho_c(k) - tol ||
          std::exp2(alpha(k)) > 1.0 + rho(k) + tol || std::exp2(alpha_c(k)) > 1.0 + rho_c(k) + tol ||
          th * alpha(k) + c(k) < t - tol)
        return {false, fmt::format("instance {}: subproblem point violates the original constraints for user {}", i, k)};
      double need = c.sum() - th * alpha_c(k);
      if (!g.is_relay(k)) need -= (1.0 - th) * coop_log_term(ch, g.group1, cfg.relay_powers, k);
      if (need > tol) return {false, fmt::format("instance {}: split exceeds user {}'s common rate", i, k)};
    }
  }
  return {true, fmt::format("{} instances", o.instances)};
}

Outcome strategy_ordering(const PropertyOptions& o) {
  // A 95% quantile is meaningless over a handful of draws.
  const int n = std::max(50, o.instances);
  int ok_crs_nrs = 0, ok_nrs_sdma = 0, ok_crs_ers = 0;
  for (int i = 0; i < n; ++i) {
    const auto cfg = SystemConfig::standard(3, 2, 20.0, {1.0, 0.3, 0.1});
    const auto ch = generate_channels(cfg, o.seed + 200 + static_cast<std::uint64_t>(i));
    const auto g = select_centralized(ch, 1);
    const double crs = sca_solve(ch, &g, cfg).maxmin_rate;
    const double ers = solve_ers(ch, g, cfg).maxmin_rate;
    const double nrs = solve_nrs(ch, cfg).maxmin_rate;
    const double sdma = solve_sdma(ch, cfg).maxmin_rate;
    ok_crs_nrs += crs >= nrs - 1e-3;
    ok_nrs_sdma += nrs >= sdma - 1e-3;
    ok_crs_ers += crs >= ers - 1e-3;
  }
  const double need = 0.95 * n;
  const bool pass = ok_crs_nrs >= need && ok_nrs_sdma >= need && ok_crs_ers >= need;
  return {pass, fmt::format("CRS>=NRS {}/{}, NRS>=SDMA {}/{}, CRS>=ERS {}/{}", ok_crs_nrs, n, ok_nrs_sdma, n,
                            ok_crs_ers, n)};
}

const std::vector<std::pair<std::string, Suite>>& suites() {
  static const std::vector<std::pair<std::string, Suite>> all = {
      {"channel.determinism", channel_determinism},
      {"channel.moments", channel_moments},
      {"rates.decomposition", rates_decomposition},
      {"rates.theta_linearity", rates_theta_linearity},
      {"rates.coop_monotone", rates_coop_monotone},
      {"rates.sic_structure", rates_sic_structure},
      {"relay.partition_equivalence", relay_partition_and_equivalence},
      {"sca.phi_bound", phi_bound},
      {"sca.dc_restriction", dc_restriction},
      {"conic.audit", conic_audit},
      {"sca.iteration", sca_iteration},
      {"baselines.ordering", strategy_ordering},
  };
  return all;
}

}  // namespace

std::vector<std::string> property_suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : suites()) names.push_back(name);
  return names;
}

std::vector<PropertyResult> run_property_suites(const PropertyOptions& options) {
  std::vector<PropertyResult> out;
  for (const auto& [name, suite] : suites()) {
    if (!options.filter.empty() && name.find(options.filter) == std::string::npos) continue;
    const auto t0 = std::chrono::steady_clock::now();
    PropertyResult r;
    r.name = name;
    try {
      const auto o = suite(options);
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = fmt::format("threw: {}", e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace crs
