// Primal log-barrier method for the constraint kinds of ConicProblem.
//
// Each constraint contributes a standard self-concordant barrier:
//   linear/quadratic   -log(-f(x))                          nu = 1
//   soc ||u|| <= s     -log(s^2 - ||u||^2), s > 0            nu = 2
//   exp2 2^e <= z      -log(ln z - e ln 2) - log z           nu = 2
// Variable bounds get a diagonal log barrier and are never relaxed; the start
// is clipped inside them. Phase I minimizes a shared relaxation r added to
// every other constraint (f <= r, ||u|| <= s + r, 2^e <= z + r) and stops as
// soon as r < 0.

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "crs/conic.hpp"

namespace crs::conic {

namespace {

constexpr double kLn2 = std::numbers::ln2;

struct Dense {
  Eigen::VectorXd a;
  double b = 0.0;
  double eval(const Eigen::VectorXd& x) const { return a.dot(x) + b; }
};

Dense densify(const AffineExpr& e, Index n) {
  Dense d{Eigen::VectorXd::Zero(n), e.constant()};
  for (const auto& [i, c] : e.terms()) d.a(i) += c;
  return d;
}

struct Row {
  ConstraintKind kind = ConstraintKind::linear;
  Dense lin;                 // f's affine part / soc s / exp2 z
  Eigen::MatrixXd quad;      // quadratic: Q with f = x'Qx + lin; soc: A (rows of u)
  Eigen::VectorXd offset;    // soc: b in u = A x + b
  Dense exponent;            // exp2
  double nu = 1.0;
};

struct Internal {
  Index n = 0;
  std::vector<Row> rows;
  Eigen::VectorXd lo;  // box on the first lo.size() variables, never relaxed
  Eigen::VectorXd hi;
  Eigen::VectorXd cost;  // minimize cost'x
  double nu = 0.0;
};

Internal build(const ConicProblem& p, double default_bound, bool phase1) {
  const Index n0 = p.num_variables();
  Internal out;
  out.n = phase1 ? n0 + 1 : n0;
  const Index n = out.n;
  auto pad = [&](Dense d, double relax) {
    if (phase1) {
      d.a.conservativeResize(n);
      d.a(n0) = relax;
    }
    return d;
  };

  for (const auto& c : p.constraints()) {
    Row r;
    r.kind = c.kind;
    switch (c.kind) {
      case ConstraintKind::linear:
        r.lin = pad(densify(c.expr, n0), -1.0);
        r.nu = 1.0;
        break;
      case ConstraintKind::quadratic: {
        Dense lin = densify(c.expr, n0);
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
        for (const auto& s : c.squares) {
          Dense d = densify(s, n0);
          q.topLeftCorner(n0, n0).noalias() += d.a * d.a.transpose();
          lin.a += 2.0 * d.b * d.a;
          lin.b += d.b * d.b;
        }
        r.lin = pad(lin, -1.0);
        r.quad = std::move(q);
        r.nu = 1.0;
        break;
      }
      case ConstraintKind::soc: {
        const auto m = static_cast<Index>(c.squares.size());
        r.quad = Eigen::MatrixXd::Zero(m, n);
        r.offset.resize(m);
        for (Index i = 0; i < m; ++i) {
          Dense d = densify(c.squares[static_cast<std::size_t>(i)], n0);
          r.quad.row(i).head(n0) = d.a.transpose();
          r.offset(i) = d.b;
        }
        r.lin = pad(densify(c.expr, n0), 1.0);
        r.nu = 2.0;
        break;
      }
      case ConstraintKind::exp2:
        r.lin = pad(densify(c.expr, n0), 1.0);
        r.exponent = pad(densify(c.exponent, n0), 0.0);
        r.nu = 2.0;
        break;
    }
    out.rows.push_back(std::move(r));
  }

  out.lo.resize(n0);
  out.hi.resize(n0);
  for (Index i = 0; i < n0; ++i) {
    out.lo(i) = std::isfinite(p.lower()(i)) ? p.lower()(i) : -default_bound;
    out.hi(i) = std::isfinite(p.upper()(i)) ? p.upper()(i) : default_bound;
  }

  out.cost = Eigen::VectorXd::Zero(n);
  if (phase1) {
    out.cost(n0) = 1.0;
  } else {
    out.cost = -densify(p.objective(), n0).a;
  }
  for (const auto& r : out.rows) out.nu += r.nu;
  out.nu += 2.0 * static_cast<double>(n0);
  return out;
}

/// Barrier value; +inf outside the domain.
double barrier_value(const Internal& prob, const Eigen::VectorXd& x) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double phi = 0.0;
  for (Index i = 0; i < prob.lo.size(); ++i) {
    const double up = prob.hi(i) - x(i);
    const double down = x(i) - prob.lo(i);
    if (!(up > 0.0) || !(down > 0.0)) return inf;
    phi -= std::log(up) + std::log(down);
  }
  for (const auto& r : prob.rows) {
    switch (r.kind) {
      case ConstraintKind::linear: {
        const double v = -r.lin.eval(x);
        if (!(v > 0.0)) return inf;
        phi -= std::log(v);
        break;
      }
      case ConstraintKind::quadratic: {
        const double v = -(x.dot(r.quad * x) + r.lin.eval(x));
        if (!(v > 0.0)) return inf;
        phi -= std::log(v);
        break;
      }
      case ConstraintKind::soc: {
        const double s = r.lin.eval(x);
        const Eigen::VectorXd u = r.quad * x + r.offset;
        const double w = s * s - u.squaredNorm();
        if (!(s > 0.0) || !(w > 0.0)) return inf;
        phi -= std::log(w);
        break;
      }
      case ConstraintKind::exp2: {
        const double z = r.lin.eval(x);
        if (!(z > 0.0)) return inf;
        const double u = std::log(z) - kLn2 * r.exponent.eval(x);
        if (!(u > 0.0)) return inf;
        phi -= std::log(u) + std::log(z);
        break;
      }
    }
  }
  return phi;
}

void barrier_derivatives(const Internal& prob, const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                         Eigen::MatrixXd& hess) {
  grad.setZero(prob.n);
  hess.setZero(prob.n, prob.n);
  for (Index i = 0; i < prob.lo.size(); ++i) {
    const double up = 1.0 / (prob.hi(i) - x(i));
    const double down = 1.0 / (x(i) - prob.lo(i));
    grad(i) += up - down;
    hess(i, i) += up * up + down * down;
  }
  for (const auto& r : prob.rows) {
    switch (r.kind) {
      case ConstraintKind::linear: {
        const double v = -r.lin.eval(x);
        grad += r.lin.a / v;
        hess.noalias() += (r.lin.a / v) * (r.lin.a / v).transpose();
        break;
      }
      case ConstraintKind::quadratic: {
        const Eigen::VectorXd qx = r.quad * x;
        const double v = -(x.dot(qx) + r.lin.eval(x));
        const Eigen::VectorXd df = 2.0 * qx + r.lin.a;
        grad += df / v;
        hess.noalias() += (df / v) * (df / v).transpose();
        hess += (2.0 / v) * r.quad;
        break;
      }
      case ConstraintKind::soc: {
        const double s = r.lin.eval(x);
        const Eigen::VectorXd u = r.quad * x + r.offset;
        const double w = s * s - u.squaredNorm();
        const Eigen::VectorXd dw = 2.0 * s * r.lin.a - 2.0 * r.quad.transpose() * u;
        grad -= dw / w;
        hess.noalias() += (dw / w) * (dw / w).transpose();
        hess.noalias() -= (2.0 / w) * r.lin.a * r.lin.a.transpose();
        hess.noalias() += (2.0 / w) * r.quad.transpose() * r.quad;
        break;
      }
      case ConstraintKind::exp2: {
        const double z = r.lin.eval(x);
        const double u = std::log(z) - kLn2 * r.exponent.eval(x);
        const Eigen::VectorXd du = r.lin.a / z - kLn2 * r.exponent.a;
        grad -= du / u + r.lin.a / z;
        hess.noalias() += (du / u) * (du / u).transpose();
        hess.noalias() += (1.0 / (z * z * u) + 1.0 / (z * z)) * r.lin.a * r.lin.a.transpose();
        break;
      }
    }
  }
}

enum class Outcome { converged, stopped_early, stalled, iteration_cap };

struct RunResult {
  Outcome outcome = Outcome::stalled;
  Eigen::VectorXd x;
  double tb = 1.0;
  int newton_steps = 0;
};

/// Barrier path following from a strictly feasible x. `stop` is checked after
/// every accepted step (phase I uses it to quit once r < 0).
template <typename Stop>
RunResult follow_path(const Internal& prob, Eigen::VectorXd x, double tb, const SolverOptions& opt,
                      double gap_tolerance, const AffineExpr* objective, Stop stop) {
  RunResult res;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  Eigen::LDLT<Eigen::MatrixXd> ldlt;

  while (true) {
    int it = 0;
    for (; it < opt.max_newton_per_center; ++it) {
      barrier_derivatives(prob, x, grad, hess);
      const Eigen::VectorXd g = tb * prob.cost + grad;
      ldlt.compute(hess);
      Eigen::VectorXd dx = ldlt.solve(-g);
      if (ldlt.info() != Eigen::Success || !dx.allFinite()) {
        const double reg = 1e-12 * std::max(1.0, hess.diagonal().maxCoeff());
        ldlt.compute(hess + reg * Eigen::MatrixXd::Identity(prob.n, prob.n));
        dx = ldlt.solve(-g);
        if (!dx.allFinite()) {
          res.outcome = Outcome::stalled;
          res.x = x;
          res.tb = tb;
          return res;
        }
      }
      const double lambda2 = std::max(0.0, -g.dot(dx));
      if (lambda2 / 2.0 <= 1e-10) break;
      // Past this point rounding in g (of size tb) dominates the decrement.
      if (it >= 40 && lambda2 / 2.0 <= 1e-6) break;

      // Every barrier here is self-concordant, so the damped step 1/(1+lambda)
      // stays in the domain and decreases the centering objective; full steps
      // inside the quadratic-convergence region. Halving guards rounding.
      const double lambda = std::sqrt(lambda2);
      double step = lambda > 0.25 ? 1.0 / (1.0 + lambda) : 1.0;
      bool inside = false;
      for (int ls = 0; ls < 60; ++ls) {
        if (std::isfinite(barrier_value(prob, x + step * dx))) {
          inside = true;
          break;
        }
        step *= 0.5;
      }
      if (!inside) {
        res.outcome = Outcome::stalled;
        res.x = x;
        res.tb = tb;
        return res;
      }
      x += step * dx;
      ++res.newton_steps;
      if (stop(x)) {
        res.outcome = Outcome::stopped_early;
        res.x = x;
        res.tb = tb;
        return res;
      }
    }
    if (it == opt.max_newton_per_center) {
      res.outcome = Outcome::iteration_cap;
      res.x = x;
      res.tb = tb;
      return res;
    }
    const double scale = objective ? std::max(1.0, std::abs(objective->evaluate(x))) : 1.0;
    if (prob.nu / tb <= gap_tolerance * scale) {
      res.outcome = Outcome::converged;
      res.x = x;
      res.tb = tb;
      return res;
    }
    tb *= opt.barrier_growth;
  }
}

/// Smallest relaxation r making x strictly inside every relaxed constraint.
double required_relaxation(const Internal& phase2, const Eigen::VectorXd& x) {
  double need = -std::numeric_limits<double>::infinity();
  for (const auto& r : phase2.rows) {
    switch (r.kind) {
      case ConstraintKind::linear:
        need = std::max(need, r.lin.eval(x));
        break;
      case ConstraintKind::quadratic:
        need = std::max(need, x.dot(r.quad * x) + r.lin.eval(x));
        break;
      case ConstraintKind::soc:
        need = std::max(need, (r.quad * x + r.offset).norm() - r.lin.eval(x));
        break;
      case ConstraintKind::exp2:
        need = std::max(need, std::exp2(r.exponent.eval(x)) - r.lin.eval(x));
        break;
    }
  }
  return need;
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolverOptions& options) {
  ConicSolution sol;
  const Index n = problem.num_variables();
  if (n == 0) {
    sol.status = SolveStatus::numerical_failure;
    sol.message = "problem has no variables";
    return sol;
  }
  const Internal phase2 = build(problem, options.default_bound, false);

  // Start: warm start (or origin) clipped strictly inside the box.
  Eigen::VectorXd x = problem.start().size() == n ? problem.start() : Eigen::VectorXd::Zero(n);
  for (Index i = 0; i < n; ++i) {
    double lo = problem.lower()(i);
    double hi = problem.upper()(i);
    if (!std::isfinite(lo)) lo = -options.default_bound;
    if (!std::isfinite(hi)) hi = options.default_bound;
    const double margin = std::min(1e-3 * (hi - lo), 1e-6 * std::max(1.0, std::abs(x(i))) + 1e-9 * (hi - lo));
    x(i) = std::clamp(x(i), lo + margin, hi - margin);
    if (!(x(i) > lo && x(i) < hi)) x(i) = 0.5 * (lo + hi);
  }

  if (!std::isfinite(barrier_value(phase2, x))) {
    const Internal phase1 = build(problem, options.default_bound, true);
    const double need = required_relaxation(phase2, x);
    Eigen::VectorXd y(n + 1);
    y.head(n) = x;
    y(n) = need + std::max(1.0, 0.1 * std::abs(need));
    if (!std::isfinite(barrier_value(phase1, y))) {
      sol.status = SolveStatus::numerical_failure;
      sol.message = "could not construct a phase-I starting point";
      sol.values = x;
      return sol;
    }
    // A far-off start needs a light first weight on r, otherwise the first
    // centering has to walk the whole way down at tb = 1.
    auto run = follow_path(phase1, y, 1.0 / std::max(1.0, std::abs(need)), options, options.gap_tolerance,
                           nullptr, [n](const Eigen::VectorXd& v) { return v(n) < 0.0; });
    sol.newton_steps += run.newton_steps;
    if (run.outcome != Outcome::stopped_early) {
      sol.values = run.x.head(n);
      sol.max_constraint_violation = problem.max_violation(sol.values);
      if (run.outcome == Outcome::converged) {
        sol.status = SolveStatus::infeasible;
        sol.message = fmt::format("phase I minimum relaxation {:.3e} is nonnegative", run.x(n));
      } else {
        sol.status = SolveStatus::numerical_failure;
        sol.message = fmt::format("phase I stopped at relaxation {:.3e} before reaching the interior", run.x(n));
      }
      return sol;
    }
    x = run.x.head(n);
  }

  auto run = follow_path(phase2, x, 1.0, options, options.gap_tolerance, &problem.objective(),
                         [](const Eigen::VectorXd&) { return false; });
  sol.newton_steps += run.newton_steps;
  sol.values = run.x;
  sol.objective_value = problem.objective().evaluate(run.x);
  sol.max_constraint_violation = problem.max_violation(run.x);
  const double gap = phase2.nu / run.tb;
  switch (run.outcome) {
    case Outcome::converged:
      sol.status = SolveStatus::optimal;
      break;
    case Outcome::stalled:
    case Outcome::iteration_cap:
      if (gap <= 1e-6 * std::max(1.0, std::abs(sol.objective_value))) {
        sol.status = SolveStatus::near_optimal;
        sol.message = fmt::format("stopped at duality gap {:.3e}", gap);
      } else {
        sol.status = SolveStatus::numerical_failure;
        sol.message = fmt::format("{} at duality gap {:.3e}",
                                  run.outcome == Outcome::stalled ? "line search stalled" : "newton cap reached", gap);
      }
      break;
    case Outcome::stopped_early:
      sol.status = SolveStatus::optimal;
      break;
  }
  return sol;
}

}  // namespace crs::conic
