#include "crs/sca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "crs/errors.hpp"

namespace crs {

namespace {

using conic::AffineExpr;

double abs2_inner(const Eigen::VectorXcd& h, const Eigen::VectorXcd& p) { return std::norm(h.dot(p)); }

Eigen::VectorXcd random_unit(GaussianSource& rng, int n) {
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.complex_normal(1.0);
  const double norm = v.norm();
  return norm > 0.0 ? Eigen::VectorXcd(v / norm) : Eigen::VectorXcd::Unit(n, 0);
}

/// Sets every slack to the exact SINR/rate of the current precoders and the
/// objective to min_k (theta * alpha_k + C_k).
void tighten(SCAState& s, const ChannelRealization& channels, const RelayGrouping* grouping,
             std::span<const double> relay_powers, bool use_common) {
  const int k_users = channels.num_users();
  for (int k = 0; k < k_users; ++k) {
    const double sp = private_sinr(channels, s.precoders, k);
    s.alpha(k) = std::log2(1.0 + sp);
    s.rho(k) = std::max(sp, kRhoFloor);
    if (use_common) {
      const double sc = common_sinr(channels, s.precoders, k);
      s.alpha_common(k) = std::log2(1.0 + sc);
      s.rho_common(k) = std::max(sc, kRhoFloor);
    }
  }

  if (use_common) {
    // Guard against round-off pushing the split past the achievable common rate.
    double common = std::numeric_limits<double>::infinity();
    for (int k = 0; k < k_users; ++k) {
      double r = s.theta * s.alpha_common(k);
      if (grouping && !grouping->is_relay(k))
        r += (1.0 - s.theta) * coop_log_term(channels, grouping->group1, relay_powers, k);
      common = std::min(common, r);
    }
    // The split is linear and exact, so re-dividing the achievable common
    // rate by water-filling over the private rates can only raise the
    // minimum; it also absorbs round-off that pushed the sum past the cap.
    const double budget = std::max(common, 0.0);
    std::vector<double> level(static_cast<std::size_t>(k_users));
    for (int k = 0; k < k_users; ++k) level[static_cast<std::size_t>(k)] = s.theta * s.alpha(k);
    std::vector<double> sorted = level;
    std::sort(sorted.begin(), sorted.end());
    double water = sorted.front() + budget;
    double filled = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      filled += sorted[i];
      const double w = (budget + filled) / static_cast<double>(i + 1);
      if (i + 1 == sorted.size() || w <= sorted[i + 1]) {
        water = w;
        break;
      }
    }
    for (int k = 0; k < k_users; ++k)
      s.split[static_cast<std::size_t>(k)] = std::max(0.0, water - level[static_cast<std::size_t>(k)]);
  }

  double t = std::numeric_limits<double>::infinity();
  for (int k = 0; k < k_users; ++k)
    t = std::min(t, s.theta * s.alpha(k) + s.split[static_cast<std::size_t>(k)]);
  s.objective = t;
}

/// theta*x bounded below: exact when theta is fixed, by the concave minorant
/// otherwise. Returns the affine part; the square (if any) is appended.
AffineExpr product_lower(const Subproblem& sp, const SCAState& state, const ScaMode& mode, const AffineExpr& x,
                         double x_n, std::vector<AffineExpr>& squares) {
  if (mode.fixed_theta) return *mode.fixed_theta * x;
  const AffineExpr theta = sp.problem.var(*sp.theta);
  const double sum = state.theta + x_n;
  // Phi = S/2 (theta + x) - S^2/4 - ((theta - x)/2)^2
  squares.push_back(0.5 * (theta - x));
  return 0.5 * sum * (theta + x) - 0.25 * sum * sum;
}

void check_mode(const ScaMode& mode, const RelayGrouping* grouping) {
  if (mode.fixed_theta && !(*mode.fixed_theta > 0.0 && *mode.fixed_theta <= 1.0))
    throw ConfigError("fixed theta must lie in (0, 1]");
  if (!mode.use_common && grouping) throw ConfigError("relaying requires the common stream");
}

}  // namespace

SCAState initialize(const ChannelRealization& channels, const RelayGrouping* grouping, const SystemConfig& config,
                    const ScaMode& mode) {
  check_mode(mode, grouping);
  const int k_users = channels.num_users();
  const int nt = channels.num_tx_antennas();
  if (grouping) grouping->validate(k_users);
  const double pt = config.bs_power;
  const double beta = config.init_power_split;

  GaussianSource fallback(channels.seed ^ 0x9e3779b97f4a7c15ULL);
  auto direction = [&](int k) -> Eigen::VectorXcd {
    const auto& h = channels.bs_channels[static_cast<std::size_t>(k)];
    const double norm = h.norm();
    if (norm > 0.0) return h / norm;
    spdlog::info("user {} has a zero channel; using a random unit precoder", k);
    return random_unit(fallback, nt);
  };

  SCAState s;
  s.precoders = PrecoderSet::zeros(k_users, nt);
  if (mode.use_common) {
    // Each private stream gets beta*P_t/2; beyond two users that overshoots
    // the budget, so the privates are scaled back to beta*P_t in total.
    double per_user = beta * pt / 2.0;
    if (k_users > 2) per_user = beta * pt / k_users;
    for (int k = 0; k < k_users; ++k) s.precoders.privates[static_cast<std::size_t>(k)] = std::sqrt(per_user) * direction(k);

    Eigen::MatrixXcd h(nt, k_users);
    for (int k = 0; k < k_users; ++k) h.col(k) = channels.bs_channels[static_cast<std::size_t>(k)];
    Eigen::VectorXcd uc;
    if (h.norm() > 0.0) {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h, Eigen::ComputeThinU);
      uc = svd.matrixU().col(0);
    } else {
      spdlog::info("all channels are zero; using a random common precoder");
      uc = random_unit(fallback, nt);
    }
    s.precoders.common = std::sqrt((1.0 - beta) * pt) * uc;
  } else {
    for (int k = 0; k < k_users; ++k)
      s.precoders.privates[static_cast<std::size_t>(k)] = std::sqrt(pt / k_users) * direction(k);
  }

  s.theta = mode.fixed_theta.value_or(config.init_theta);
  s.alpha = Eigen::VectorXd::Zero(k_users);
  s.alpha_common = Eigen::VectorXd::Zero(k_users);
  s.rho = Eigen::VectorXd::Zero(k_users);
  s.rho_common = Eigen::VectorXd::Zero(k_users);
  s.split.assign(static_cast<std::size_t>(k_users), 0.0);
  tighten(s, channels, grouping, config.relay_powers, mode.use_common);
  s.history.push_back(s.objective);
  return s;
}

double phi_lower_bound(double theta, double alpha, double theta_n, double alpha_n) {
  const double s = theta_n + alpha_n;
  const double d = theta - alpha;
  return 0.5 * s * (theta + alpha) - 0.25 * s * s - 0.25 * d * d;
}

namespace {

struct DcTerms {
  double interference = 0.0;
  Eigen::VectorXcd wanted;  // precoder whose gain is divided by rho
};

DcTerms dc_terms(const ChannelRealization& channels, const PrecoderSet& precoders, int k, Stream stream) {
  if (k < 0 || k >= channels.num_users()) throw std::out_of_range("user index out of range");
  const auto& h = channels.bs_channels[static_cast<std::size_t>(k)];
  DcTerms d;
  for (std::size_t j = 0; j < precoders.privates.size(); ++j)
    if (stream == Stream::common_stream || static_cast<int>(j) != k) d.interference += abs2_inner(h, precoders.privates[j]);
  d.wanted = stream == Stream::common_stream ? precoders.common : precoders.privates[static_cast<std::size_t>(k)];
  return d;
}

}  // namespace

double dc_original_lhs(const ChannelRealization& channels, const PrecoderSet& precoders, double rho, int k,
                       Stream stream) {
  const auto d = dc_terms(channels, precoders, k, stream);
  const auto& h = channels.bs_channels[static_cast<std::size_t>(k)];
  return d.interference + 1.0 - abs2_inner(h, d.wanted) / rho;
}

double dc_linearized_lhs(const ChannelRealization& channels, const PrecoderSet& precoders, double rho,
                         const PrecoderSet& expansion, double rho_n, int k, Stream stream) {
  if (!(rho_n > 0.0)) throw ConfigError("expansion SINR must be strictly positive");
  const auto d = dc_terms(channels, precoders, k, stream);
  const auto e = dc_terms(channels, expansion, k, stream);
  const auto& h = channels.bs_channels[static_cast<std::size_t>(k)];
  const cd a = h.dot(e.wanted);  // h^H p_n
  const cd x = h.dot(d.wanted);  // h^H p
  const double cross = (std::conj(a) * x).real();
  return d.interference + 1.0 - 2.0 * cross / rho_n + std::norm(a) * rho / (rho_n * rho_n);
}

Subproblem assemble_subproblem(const SCAState& state, const ChannelRealization& channels,
                               const RelayGrouping* grouping, const SystemConfig& config, const ScaMode& mode) {
  check_mode(mode, grouping);
  const int k_users = channels.num_users();
  const int nt = channels.num_tx_antennas();
  const double scale = std::sqrt(config.bs_power);

  Subproblem sp;
  sp.power_scale = scale;
  auto& pr = sp.problem;

  if (mode.use_common) sp.common = pr.add_complex("p_c", nt);
  for (int k = 0; k < k_users; ++k) sp.privates.push_back(pr.add_complex(fmt::format("p_{}", k), nt));
  if (!mode.fixed_theta) sp.theta = pr.add_real("theta", 1, kThetaMin, 1.0);
  sp.t = pr.add_real("t", 1, -10.0, 1e3);
  sp.alpha = pr.add_real("alpha", k_users, -30.0, 60.0);
  if (mode.use_common) sp.alpha_common = pr.add_real("alpha_c", k_users, -30.0, 60.0);
  sp.rho = pr.add_real("rho", k_users, -1.0, 1e7);
  if (mode.use_common) sp.rho_common = pr.add_real("rho_c", k_users, -1.0, 1e7);
  if (mode.use_common) sp.split = pr.add_real("c", k_users, 0.0, 1e3);

  std::vector<Eigen::VectorXcd> g;
  for (const auto& h : channels.bs_channels) g.push_back(scale * h);
  std::vector<Eigen::VectorXcd> qn;
  for (const auto& p : state.precoders.privates) qn.push_back(p / scale);
  const Eigen::VectorXcd qcn = state.precoders.common / scale;

  AffineExpr split_sum;
  if (sp.split)
    for (int k = 0; k < k_users; ++k) split_sum += pr.var(*sp.split, k);

  // Rate bounds per user on the private stream.
  for (int k = 0; k < k_users; ++k) {
    std::vector<AffineExpr> squares;
    AffineExpr lhs = pr.var(sp.t) - product_lower(sp, state, mode, pr.var(sp.alpha, k), state.alpha(k), squares);
    if (sp.split) lhs -= pr.var(*sp.split, k);
    if (squares.empty()) pr.add_linear(lhs, "rate_private");
    else pr.add_quadratic(squares, lhs, "rate_private");
  }

  // The split must be decodable by every user: direct phase only for relays
  // (or everyone without relaying), plus the cooperative phase for the rest.
  if (mode.use_common) {
    for (int k = 0; k < k_users; ++k) {
      std::vector<AffineExpr> squares;
      AffineExpr lhs = split_sum - product_lower(sp, state, mode, pr.var(*sp.alpha_common, k), state.alpha_common(k), squares);
      const bool assisted = grouping && !grouping->is_relay(k);
      if (assisted) {
        const double f2 = coop_log_term(channels, grouping->group1, config.relay_powers, k);
        if (mode.fixed_theta) lhs -= (1.0 - *mode.fixed_theta) * f2;
        else lhs -= f2 - f2 * pr.var(*sp.theta);
      }
      const char* tag = assisted ? "rate_common_assisted" : "rate_common_relay";
      if (squares.empty()) pr.add_linear(lhs, tag);
      else pr.add_quadratic(squares, lhs, tag);
    }
  }

  for (int k = 0; k < k_users; ++k) pr.add_exp2(pr.var(sp.alpha, k), 1.0 + pr.var(sp.rho, k), "sinr_private_exp");
  if (mode.use_common)
    for (int k = 0; k < k_users; ++k)
      pr.add_exp2(pr.var(*sp.alpha_common, k), 1.0 + pr.var(*sp.rho_common, k), "sinr_common_exp");

  // Linearized SINR constraints, divided by the expansion-point
  // interference-plus-noise so every row is O(1).
  auto add_dc = [&](int k, bool common_stream) {
    const auto& gk = g[static_cast<std::size_t>(k)];
    const conic::BlockId wanted = common_stream ? sp.common : sp.privates[static_cast<std::size_t>(k)];
    const Eigen::VectorXcd& wanted_n = common_stream ? qcn : qn[static_cast<std::size_t>(k)];
    const conic::BlockId rho_block = common_stream ? *sp.rho_common : sp.rho;
    const double rho_n = common_stream ? state.rho_common(k) : state.rho(k);
    const char* tag = common_stream ? "dc_common" : "dc_private";

    double denom = 1.0;
    for (int j = 0; j < k_users; ++j)
      if (common_stream || j != k) denom += abs2_inner(gk, qn[static_cast<std::size_t>(j)]);
    const cd a = gk.dot(wanted_n);
    if (std::norm(a) <= 1e-14 * denom) {
      // No signal at the expansion point: the only safe restriction is rho <= 0.
      pr.add_linear(pr.var(rho_block, k), tag);
      return;
    }
    std::vector<AffineExpr> squares;
    for (int j = 0; j < k_users; ++j)
      if (common_stream || j != k) pr.append_abs2(squares, gk, sp.privates[static_cast<std::size_t>(j)], 1.0 / denom);
    const AffineExpr cross = a.real() * pr.re_inner(gk, wanted) + a.imag() * pr.im_inner(gk, wanted);
    AffineExpr lhs = 1.0 - (2.0 / rho_n) * cross + (std::norm(a) / (rho_n * rho_n)) * pr.var(rho_block, k);
    pr.add_quadratic(squares, lhs * (1.0 / denom), tag);
  };
  for (int k = 0; k < k_users; ++k) add_dc(k, false);
  if (mode.use_common)
    for (int k = 0; k < k_users; ++k) add_dc(k, true);

  std::vector<AffineExpr> power;
  auto push_block = [&](conic::BlockId b) {
    for (int i = 0; i < nt; ++i) {
      power.push_back(pr.re(b, i));
      power.push_back(pr.im(b, i));
    }
  };
  if (mode.use_common) push_block(sp.common);
  for (const auto& b : sp.privates) push_block(b);
  pr.add_quadratic(power, -1.0, "power");

  pr.maximize(pr.var(sp.t));

  // Warm start at the expansion point; the solver restores strict feasibility.
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(pr.num_variables());
  auto put_complex = [&](conic::BlockId b, const Eigen::VectorXcd& v) {
    const auto off = pr.blocks()[b.index].offset;
    for (int i = 0; i < nt; ++i) {
      x0(off + 2 * i) = v(i).real();
      x0(off + 2 * i + 1) = v(i).imag();
    }
  };
  auto put_real = [&](conic::BlockId b, const Eigen::VectorXd& v) {
    x0.segment(pr.blocks()[b.index].offset, v.size()) = v;
  };
  if (mode.use_common) put_complex(sp.common, qcn);
  for (int k = 0; k < k_users; ++k) put_complex(sp.privates[static_cast<std::size_t>(k)], qn[static_cast<std::size_t>(k)]);
  if (sp.theta) put_real(*sp.theta, Eigen::VectorXd::Constant(1, state.theta));
  put_real(sp.t, Eigen::VectorXd::Constant(1, state.objective));
  put_real(sp.alpha, state.alpha);
  put_real(sp.rho, state.rho);
  if (mode.use_common) {
    put_real(*sp.alpha_common, state.alpha_common);
    put_real(*sp.rho_common, state.rho_common);
    put_real(*sp.split, Eigen::Map<const Eigen::VectorXd>(state.split.data(), k_users));
  }
  pr.set_start(std::move(x0));
  return sp;
}

namespace {

/// Reads precoders, theta and split out of a subproblem solution.
void extract(const Subproblem& sp, const conic::ConicSolution& sol, const ScaMode& mode, SCAState& s) {
  const auto& pr = sp.problem;
  if (mode.use_common) s.precoders.common = sp.power_scale * sol.complex_block(pr, sp.common);
  for (std::size_t k = 0; k < sp.privates.size(); ++k)
    s.precoders.privates[k] = sp.power_scale * sol.complex_block(pr, sp.privates[k]);
  // Interior-point iterates can sit a hair outside the unit ball.
  const double power = s.precoders.total_power();
  const double budget = sp.power_scale * sp.power_scale;
  if (power > budget) {
    const double shrink = std::sqrt(budget / power);
    s.precoders.common *= shrink;
    for (auto& p : s.precoders.privates) p *= shrink;
  }
  if (sp.theta) s.theta = std::clamp(sol.value(pr, *sp.theta), kThetaMin, 1.0);
  if (sp.split) {
    const Eigen::VectorXd c = sol.real_block(pr, *sp.split);
    for (std::size_t k = 0; k < s.split.size(); ++k) s.split[k] = std::max(0.0, c(static_cast<Eigen::Index>(k)));
  }
}

void perturb(SCAState& s, std::uint64_t seed) {
  GaussianSource rng(seed);
  auto jitter = [&](Eigen::VectorXcd& p) {
    const double scale = 1e-4 * std::max(p.norm(), 1e-12) / std::sqrt(static_cast<double>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) += scale * rng.complex_normal(1.0);
  };
  if (s.precoders.common.norm() > 0.0) jitter(s.precoders.common);
  for (auto& p : s.precoders.privates) jitter(p);
}

}  // namespace

Solution sca_solve(const ChannelRealization& channels, const RelayGrouping* grouping, const SystemConfig& config,
                   const ScaMode& mode) {
  config.validate();
  if (channels.num_users() != config.num_users || channels.num_tx_antennas() != config.num_tx_antennas)
    throw ConfigError("channel dimensions do not match the configuration");

  SCAState state = initialize(channels, grouping, config, mode);
  Solution out;
  out.trace.push_back({0, state.objective, state.theta, state.precoders.total_power(), 0.0});

  bool converged = false;
  int n = 0;
  while (n < config.sca_max_iterations) {
    conic::ConicSolution sol;
    Subproblem sp = assemble_subproblem(state, channels, grouping, config, mode);
    sol = conic::solve(sp.problem);
    ++out.subproblem_solves;
    if (!sol.ok()) {
      spdlog::debug("subproblem {} failed ({}: {}); retrying from a perturbed iterate", n + 1,
                    conic::to_string(sol.status), sol.message);
      SCAState retry = state;
      perturb(retry, channels.seed + 0x51ed2701ULL * static_cast<std::uint64_t>(n + 1));
      tighten(retry, channels, grouping, config.relay_powers, mode.use_common);
      sp = assemble_subproblem(retry, channels, grouping, config, mode);
      sol = conic::solve(sp.problem);
      ++out.subproblem_solves;
      if (!sol.ok())
        throw SolverError(fmt::format("subproblem at iteration {} failed twice: {} ({})", n + 1,
                                      conic::to_string(sol.status), sol.message));
    }

    const double previous = state.objective;
    extract(sp, sol, mode, state);
    tighten(state, channels, grouping, config.relay_powers, mode.use_common);
    ++n;
    state.iteration = n;
    state.history.push_back(state.objective);
    out.trace.push_back({n, state.objective, state.theta, state.precoders.total_power(), sol.max_constraint_violation});
    if (std::abs(state.objective - previous) < config.sca_tolerance) {
      converged = true;
      break;
    }
  }

  out.precoders = state.precoders;
  out.common_split = state.split;
  out.theta = state.theta;
  out.maxmin_rate = state.objective;
  out.iterations = n;
  out.converged = converged;
  out.history = state.history;

  const auto audit = evaluate_solution(channels, grouping, config.relay_powers, config.bs_power, out);
  if (std::abs(audit.maxmin - out.maxmin_rate) > 1e-4)
    throw SolverError(fmt::format("solver objective {} disagrees with the evaluated max-min rate {}",
                                  out.maxmin_rate, audit.maxmin));
  return out;
}

void write_trace_csv(std::ostream& os, const Solution& solution) {
  os << "iteration,objective,theta,power,max_violation\n";
  for (const auto& r : solution.trace)
    os << fmt::format("{},{:.12g},{:.12g},{:.12g},{:.3e}\n", r.iteration, r.objective, r.theta, r.power,
                      r.max_violation);
}

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::holds: return "holds";
    case CheckStatus::fails: return "fails";
    case CheckStatus::not_applicable: return "not-applicable";
  }
  return "?";
}

Proposition1Report proposition1_check(const RateBreakdown& breakdown, double theta, const RelayGrouping& grouping,
                                      double tol) {
  Proposition1Report r;
  if (!(theta > 0.01 && theta < 0.99)) {
    r.message = fmt::format("theta {} is at a bound", theta);
    return r;
  }
  r.gap = std::abs(breakdown.group1_common - breakdown.group2_common);
  r.worst_direct_group1 = std::numeric_limits<double>::infinity();
  r.worst_direct_group2 = std::numeric_limits<double>::infinity();
  for (int k : grouping.group1)
    r.worst_direct_group1 = std::min(r.worst_direct_group1, breakdown.common_direct[static_cast<std::size_t>(k)]);
  for (int k : grouping.group2)
    r.worst_direct_group2 = std::min(r.worst_direct_group2, breakdown.common_direct[static_cast<std::size_t>(k)]);
  r.equality = r.gap <= tol;
  r.grouping_rule = r.worst_direct_group1 > r.worst_direct_group2 - tol;
  r.status = r.equality && r.grouping_rule ? CheckStatus::holds : CheckStatus::fails;
  r.message = fmt::format("gap {:.6g}, weakest direct common rate {:.6g} (relays) vs {:.6g} (assisted)", r.gap,
                          r.worst_direct_group1, r.worst_direct_group2);
  return r;
}

Proposition1Report proposition1_check(const Solution& solution, const ChannelRealization& channels,
                                      const RelayGrouping& grouping, std::span<const double> relay_powers,
                                      double bs_power, double tol) {
  const auto breakdown = evaluate_solution(channels, &grouping, relay_powers, bs_power, solution);
  return proposition1_check(breakdown, solution.theta, grouping, tol);
}

}  // namespace crs
