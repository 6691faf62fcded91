#include <doctest.h>

#include <cmath>
#include <sstream>

#include "crs/conic.hpp"
#include "crs/errors.hpp"
#include "conic_instances.hpp"
#include "support.hpp"

using namespace crs;
using namespace crs::conic;
using crs::test::vec;

namespace {

void expect_optimum(const ConicProblem& p, double want) {
  const auto s = solve(p);
  INFO("status " << std::string(to_string(s.status)) << " " << s.message);
  REQUIRE(s.ok());
  CHECK(std::abs(s.objective_value - want) <= 1e-5 * std::max(1.0, std::abs(want)));
  CHECK(p.max_violation(s.values) <= 1e-6);
}

}  // namespace

TEST_CASE("hand-solvable instances") {
  const auto instances = crs::test::hand_instances();
  CHECK(instances.size() >= 20);
  for (const auto& inst : instances) {
    INFO(inst.name);
    expect_optimum(inst.problem, inst.optimum);
  }
}

TEST_CASE("beam argmax is the channel direction") {
  ConicProblem p;
  auto t = p.add_real("t");
  auto x = p.add_complex("p", 2);
  const auto h = vec({1, 0});
  p.add_linear(p.var(t) - p.re_inner(h, x));
  std::vector<AffineExpr> sq;
  for (Index i = 0; i < 2; ++i) {
    sq.push_back(p.re(x, i));
    sq.push_back(p.im(x, i));
  }
  p.add_quadratic(sq, AffineExpr(-4.0));
  p.maximize(p.var(t));
  const auto s = solve(p);
  REQUIRE(s.ok());
  CHECK(s.objective_value == doctest::Approx(2.0).epsilon(1e-5));
  const auto v = s.complex_block(p, x);
  CHECK(std::abs(v(0) - cd(2.0, 0.0)) < 1e-4);
  CHECK(std::abs(v(1)) < 1e-4);
}

TEST_CASE("infeasible problems are reported") {
  ConicProblem p;
  auto x = p.add_real("x");
  p.add_linear(p.var(x) + 1.0);
  p.add_linear(1.0 - p.var(x));
  p.maximize(p.var(x));
  CHECK(solve(p).status == SolveStatus::infeasible);

  ConicProblem q;  // 2^x <= 0.5 with x >= 0
  auto y = q.add_real("x", 1, 0.0);
  q.add_exp2(q.var(y), AffineExpr(0.5));
  q.maximize(q.var(y));
  CHECK(solve(q).status == SolveStatus::infeasible);
}

TEST_CASE("solves are deterministic") {
  ConicProblem p;
  auto x = p.add_real("x");
  auto y = p.add_real("y");
  p.add_quadratic({p.var(x) - 0.3, p.var(y)}, AffineExpr(-1.0));
  p.add_exp2(p.var(y), 2.0 - p.var(x));
  p.maximize(p.var(x) + 0.5 * p.var(y));
  const auto a = solve(p);
  const auto b = solve(p);
  REQUIRE(a.ok());
  CHECK(a.status == b.status);
  CHECK(std::abs(a.objective_value - b.objective_value) <= 1e-9);
}

TEST_CASE("warm start outside the feasible set is accepted") {
  ConicProblem p;
  auto x = p.add_real("x");
  p.add_quadratic({p.var(x)}, AffineExpr(-1.0));
  p.maximize(p.var(x));
  Eigen::VectorXd start(1);
  start << 50.0;
  p.set_start(start);
  expect_optimum(p, 1.0);
}

TEST_CASE("problem construction errors and bookkeeping") {
  ConicProblem p;
  CHECK_THROWS_AS(p.add_real("empty", 0), ConfigError);
  CHECK_THROWS_AS(p.add_real("bad", 1, 2.0, 1.0), ConfigError);
  auto x = p.add_real("x");
  auto z = p.add_complex("z", 2);
  CHECK_THROWS_AS(p.var(z), ConfigError);
  CHECK_THROWS_AS(p.re(x, 0), ConfigError);
  CHECK_THROWS_AS(p.var(x, 1), std::out_of_range);
  CHECK_THROWS_AS(p.add_linear(AffineExpr::variable(99)), ConfigError);
  CHECK_THROWS_AS(p.re_inner(vec({1}), z), ConfigError);
  CHECK(p.num_variables() == 5);

  p.add_linear(p.var(x) - 1.0, "cap");
  p.add_linear(p.var(x) - 2.0, "cap");
  CHECK(p.count("cap") == 2);
  Eigen::VectorXd at = Eigen::VectorXd::Zero(5);
  at(0) = 1.5;
  CHECK(p.max_violation(at) == doctest::Approx(0.5));

  p.maximize(p.var(x));
  std::ostringstream os;
  p.dump(os);
  CHECK(os.str().find("cap") != std::string::npos);
  CHECK(os.str().find("z") != std::string::npos);
}

TEST_CASE("affine expressions") {
  const auto e = 2.0 * AffineExpr::variable(0) - AffineExpr::variable(1, 3.0) + 1.5;
  Eigen::VectorXd x(2);
  x << 1.0, 2.0;
  CHECK(e.evaluate(x) == doctest::Approx(2.0 - 6.0 + 1.5));
  CHECK(e.max_index() == 1);
  CHECK(AffineExpr(4.0).max_index() == -1);
}
