#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "crs/conic.hpp"
#include "crs/errors.hpp"

namespace crs::conic {

AffineExpr AffineExpr::variable(Index index, double coef) {
  AffineExpr e;
  e.terms_.emplace_back(index, coef);
  return e;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) {
  for (const auto& [i, c] : other.terms_) terms_.emplace_back(i, -c);
  constant_ -= other.constant_;
  return *this;
}

AffineExpr& AffineExpr::operator*=(double scale) {
  for (auto& t : terms_) t.second *= scale;
  constant_ *= scale;
  return *this;
}

double AffineExpr::evaluate(const Eigen::VectorXd& x) const {
  double v = constant_;
  for (const auto& [i, c] : terms_) v += c * x(i);
  return v;
}

Index AffineExpr::max_index() const {
  Index m = -1;
  for (const auto& t : terms_) m = std::max(m, t.first);
  return m;
}

double Constraint::violation(const Eigen::VectorXd& x) const {
  switch (kind) {
    case ConstraintKind::linear:
      return std::max(0.0, expr.evaluate(x));
    case ConstraintKind::quadratic: {
      double f = expr.evaluate(x);
      for (const auto& s : squares) f += std::pow(s.evaluate(x), 2);
      return std::max(0.0, f);
    }
    case ConstraintKind::soc: {
      double n2 = 0.0;
      for (const auto& s : squares) n2 += std::pow(s.evaluate(x), 2);
      return std::max(0.0, std::sqrt(n2) - expr.evaluate(x));
    }
    case ConstraintKind::exp2:
      return std::max(0.0, std::exp2(exponent.evaluate(x)) - expr.evaluate(x));
  }
  return 0.0;
}

BlockId ConicProblem::add_real(std::string name, Index length, double lower, double upper) {
  if (length < 1) throw ConfigError("variable block must be nonempty");
  if (lower > upper) throw ConfigError(fmt::format("block '{}' has lower bound above upper bound", name));
  blocks_.push_back({std::move(name), num_vars_, length, false});
  lower_.conservativeResize(num_vars_ + length);
  upper_.conservativeResize(num_vars_ + length);
  lower_.tail(length).setConstant(lower);
  upper_.tail(length).setConstant(upper);
  num_vars_ += length;
  return {blocks_.size() - 1};
}

BlockId ConicProblem::add_complex(std::string name, Index length) {
  if (length < 1) throw ConfigError("variable block must be nonempty");
  blocks_.push_back({std::move(name), num_vars_, length, true});
  lower_.conservativeResize(num_vars_ + 2 * length);
  upper_.conservativeResize(num_vars_ + 2 * length);
  lower_.tail(2 * length).setConstant(-kInf);
  upper_.tail(2 * length).setConstant(kInf);
  num_vars_ += 2 * length;
  return {blocks_.size() - 1};
}

AffineExpr ConicProblem::var(BlockId block, Index i) const {
  const auto& b = blocks_.at(block.index);
  if (b.is_complex) throw ConfigError("var() called on a complex block; use re()/im()");
  if (i < 0 || i >= b.length) throw std::out_of_range("variable index out of range");
  return AffineExpr::variable(b.offset + i);
}

AffineExpr ConicProblem::re(BlockId block, Index i) const {
  const auto& b = blocks_.at(block.index);
  if (!b.is_complex) throw ConfigError("re() called on a real block");
  if (i < 0 || i >= b.length) throw std::out_of_range("variable index out of range");
  return AffineExpr::variable(b.offset + 2 * i);
}

AffineExpr ConicProblem::im(BlockId block, Index i) const {
  const auto& b = blocks_.at(block.index);
  if (!b.is_complex) throw ConfigError("im() called on a real block");
  if (i < 0 || i >= b.length) throw std::out_of_range("variable index out of range");
  return AffineExpr::variable(b.offset + 2 * i + 1);
}

AffineExpr ConicProblem::re_inner(const Eigen::VectorXcd& h, BlockId p) const {
  // h^H p = sum (hr - j hi)(pr + j pi): real part hr pr + hi pi.
  const auto& b = blocks_.at(p.index);
  if (h.size() != b.length) throw ConfigError("inner product dimension mismatch");
  AffineExpr e;
  for (Index i = 0; i < h.size(); ++i) {
    e += AffineExpr::variable(b.offset + 2 * i, h(i).real());
    e += AffineExpr::variable(b.offset + 2 * i + 1, h(i).imag());
  }
  return e;
}

AffineExpr ConicProblem::im_inner(const Eigen::VectorXcd& h, BlockId p) const {
  // Imaginary part hr pi - hi pr.
  const auto& b = blocks_.at(p.index);
  if (h.size() != b.length) throw ConfigError("inner product dimension mismatch");
  AffineExpr e;
  for (Index i = 0; i < h.size(); ++i) {
    e += AffineExpr::variable(b.offset + 2 * i + 1, h(i).real());
    e += AffineExpr::variable(b.offset + 2 * i, -h(i).imag());
  }
  return e;
}

void ConicProblem::append_abs2(std::vector<AffineExpr>& squares, const Eigen::VectorXcd& h, BlockId p,
                               double scale) const {
  const double s = std::sqrt(scale);
  squares.push_back(re_inner(h, p) * s);
  squares.push_back(im_inner(h, p) * s);
}

void ConicProblem::check(const AffineExpr& e) const {
  for (const auto& t : e.terms()) {
    if (t.first < 0 || t.first >= num_vars_)
      throw ConfigError(fmt::format("expression references undeclared variable {}", t.first));
    if (!std::isfinite(t.second)) throw ConfigError("expression has a non-finite coefficient");
  }
  if (!std::isfinite(e.constant())) throw ConfigError("expression has a non-finite constant");
}

void ConicProblem::push(Constraint c) {
  check(c.expr);
  check(c.exponent);
  for (const auto& s : c.squares) check(s);
  constraints_.push_back(std::move(c));
}

void ConicProblem::add_linear(AffineExpr lhs, std::string tag) {
  push({ConstraintKind::linear, std::move(tag), {}, std::move(lhs), {}});
}

void ConicProblem::add_quadratic(std::vector<AffineExpr> squares, AffineExpr lhs, std::string tag) {
  push({ConstraintKind::quadratic, std::move(tag), std::move(squares), std::move(lhs), {}});
}

void ConicProblem::add_soc(std::vector<AffineExpr> u, AffineExpr s, std::string tag) {
  push({ConstraintKind::soc, std::move(tag), std::move(u), std::move(s), {}});
}

void ConicProblem::add_exp2(AffineExpr exponent, AffineExpr rhs, std::string tag) {
  push({ConstraintKind::exp2, std::move(tag), {}, std::move(rhs), std::move(exponent)});
}

std::size_t ConicProblem::count(const std::string& tag) const {
  return static_cast<std::size_t>(
      std::count_if(constraints_.begin(), constraints_.end(), [&](const Constraint& c) { return c.tag == tag; }));
}

double ConicProblem::max_violation(const Eigen::VectorXd& x) const {
  double v = 0.0;
  for (const auto& c : constraints_) v = std::max(v, c.violation(x));
  for (Index i = 0; i < num_vars_; ++i) {
    v = std::max(v, lower_(i) - x(i));
    v = std::max(v, x(i) - upper_(i));
  }
  return v;
}

namespace {

void dump_expr(std::ostream& os, const AffineExpr& e) {
  os << fmt::format("{:.17g}", e.constant());
  for (const auto& [i, c] : e.terms()) os << fmt::format(" {:+.17g}*x{}", c, i);
}

const char* kind_name(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::linear: return "linear";
    case ConstraintKind::quadratic: return "quadratic";
    case ConstraintKind::soc: return "soc";
    case ConstraintKind::exp2: return "exp2";
  }
  return "?";
}

}  // namespace

void ConicProblem::dump(std::ostream& os) const {
  os << "variables " << num_vars_ << '\n';
  for (const auto& b : blocks_)
    os << fmt::format("block {} offset={} length={} {}\n", b.name, b.offset, b.length,
                      b.is_complex ? "complex" : "real");
  for (Index i = 0; i < num_vars_; ++i)
    if (std::isfinite(lower_(i)) || std::isfinite(upper_(i)))
      os << fmt::format("bound x{} [{:.17g}, {:.17g}]\n", i, lower_(i), upper_(i));
  os << "maximize ";
  dump_expr(os, objective_);
  os << '\n';
  for (const auto& c : constraints_) {
    os << "constraint " << kind_name(c.kind) << ' ' << c.tag << '\n';
    if (c.kind == ConstraintKind::exp2) {
      os << "  exponent ";
      dump_expr(os, c.exponent);
      os << '\n';
    }
    for (const auto& s : c.squares) {
      os << "  square ";
      dump_expr(os, s);
      os << '\n';
    }
    os << "  expr ";
    dump_expr(os, c.expr);
    os << '\n';
  }
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::near_optimal: return "near-optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::numerical_failure: return "numerical-failure";
  }
  return "?";
}

double ConicSolution::value(const ConicProblem& problem, BlockId block, Index i) const {
  const auto& b = problem.blocks().at(block.index);
  if (b.is_complex) throw ConfigError("value() called on a complex block");
  return values(b.offset + i);
}

Eigen::VectorXd ConicSolution::real_block(const ConicProblem& problem, BlockId block) const {
  const auto& b = problem.blocks().at(block.index);
  if (b.is_complex) throw ConfigError("real_block() called on a complex block");
  return values.segment(b.offset, b.length);
}

Eigen::VectorXcd ConicSolution::complex_block(const ConicProblem& problem, BlockId block) const {
  const auto& b = problem.blocks().at(block.index);
  if (!b.is_complex) throw ConfigError("complex_block() called on a real block");
  Eigen::VectorXcd v(b.length);
  for (Index i = 0; i < b.length; ++i) v(i) = {values(b.offset + 2 * i), values(b.offset + 2 * i + 1)};
  return v;
}

}  // namespace crs::conic
