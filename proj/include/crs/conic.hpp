#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace crs::conic {

using Index = Eigen::Index;

/// Sparse affine form sum_i coef_i * x_i + constant over the real variable vector.
class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(double constant) : constant_(constant) {}  // NOLINT: implicit on purpose

  static AffineExpr variable(Index index, double coef = 1.0);

  AffineExpr& operator+=(const AffineExpr& other);
  AffineExpr& operator-=(const AffineExpr& other);
  AffineExpr& operator*=(double scale);

  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator*(AffineExpr a, double s) { return a *= s; }
  friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
  friend AffineExpr operator-(AffineExpr a) { return a *= -1.0; }

  double constant() const { return constant_; }
  const std::vector<std::pair<Index, double>>& terms() const { return terms_; }

  double evaluate(const Eigen::VectorXd& x) const;
  Index max_index() const;  // -1 when constant

 private:
  std::vector<std::pair<Index, double>> terms_;
  double constant_ = 0.0;
};

enum class ConstraintKind {
  linear,     // expr <= 0
  quadratic,  // sum_i squares_i^2 + expr <= 0
  soc,        // ||squares|| <= expr
  exp2,       // 2^exponent <= expr
};

struct Constraint {
  ConstraintKind kind = ConstraintKind::linear;
  std::string tag;
  std::vector<AffineExpr> squares;
  AffineExpr expr;
  AffineExpr exponent;

  /// Amount by which the constraint is violated at x (0 when satisfied).
  double violation(const Eigen::VectorXd& x) const;
};

struct VariableBlock {
  std::string name;
  Index offset = 0;
  Index length = 0;  // complex entries count once
  bool is_complex = false;
};

/// Handle returned when declaring a variable block.
struct BlockId {
  std::size_t index = 0;
};

/// A convex program: maximize an affine objective subject to constraints of
/// the kinds above. Complex blocks are stored as interleaved (re, im) reals.
class ConicProblem {
 public:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  BlockId add_real(std::string name, Index length = 1, double lower = -kInf, double upper = kInf);
  BlockId add_complex(std::string name, Index length);

  AffineExpr var(BlockId block, Index i = 0) const;
  AffineExpr re(BlockId block, Index i) const;
  AffineExpr im(BlockId block, Index i) const;
  /// Re(h^H p) and Im(h^H p) for a complex block p.
  AffineExpr re_inner(const Eigen::VectorXcd& h, BlockId p) const;
  AffineExpr im_inner(const Eigen::VectorXcd& h, BlockId p) const;

  void add_linear(AffineExpr lhs, std::string tag = "linear");  // lhs <= 0
  void add_quadratic(std::vector<AffineExpr> squares, AffineExpr lhs, std::string tag = "quadratic");
  /// |h^H p|^2 appended to a list of squares.
  void append_abs2(std::vector<AffineExpr>& squares, const Eigen::VectorXcd& h, BlockId p,
                   double scale = 1.0) const;
  void add_soc(std::vector<AffineExpr> u, AffineExpr s, std::string tag = "soc");  // ||u|| <= s
  void add_exp2(AffineExpr exponent, AffineExpr rhs, std::string tag = "exp2");    // 2^e <= rhs

  void maximize(AffineExpr objective) { objective_ = std::move(objective); }
  /// Optional warm start; need not be feasible.
  void set_start(Eigen::VectorXd x) { start_ = std::move(x); }

  Index num_variables() const { return num_vars_; }
  const std::vector<VariableBlock>& blocks() const { return blocks_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  const AffineExpr& objective() const { return objective_; }
  const Eigen::VectorXd& start() const { return start_; }

  /// Count of constraints carrying the given tag.
  std::size_t count(const std::string& tag) const;

  /// Max violation over all constraints and variable bounds.
  double max_violation(const Eigen::VectorXd& x) const;

  /// Sparse text listing of variables, bounds, objective and constraints.
  void dump(std::ostream& os) const;

 private:
  void check(const AffineExpr& e) const;
  void push(Constraint c);

  std::vector<VariableBlock> blocks_;
  std::vector<Constraint> constraints_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  AffineExpr objective_;
  Eigen::VectorXd start_;
  Index num_vars_ = 0;
};

enum class SolveStatus { optimal, near_optimal, infeasible, numerical_failure };

const char* to_string(SolveStatus status);

struct ConicSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd values;
  double objective_value = 0.0;
  double max_constraint_violation = 0.0;
  int newton_steps = 0;
  std::string message;

  bool ok() const { return status == SolveStatus::optimal || status == SolveStatus::near_optimal; }
  double value(const ConicProblem& problem, BlockId block, Index i = 0) const;
  Eigen::VectorXd real_block(const ConicProblem& problem, BlockId block) const;
  Eigen::VectorXcd complex_block(const ConicProblem& problem, BlockId block) const;
};

struct SolverOptions {
  double gap_tolerance = 1e-10;      // absolute bound on the barrier duality gap
  double barrier_growth = 20.0;      // mu
  int max_newton_per_center = 200;   // numerical_failure beyond this
  double default_bound = 1e6;        // box applied to unbounded variables
};

/// Log-barrier interior-point method with a phase-I feasibility search.
ConicSolution solve(const ConicProblem& problem, const SolverOptions& options = {});

}  // namespace crs::conic
