#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "crs/conic.hpp"
#include "support.hpp"

namespace crs::test {

/// A small convex program whose optimum is known in closed form.
struct HandInstance {
  std::string name;
  conic::ConicProblem problem;
  double optimum = 0.0;
};

inline std::vector<HandInstance> hand_instances() {
  using conic::AffineExpr;
  using conic::ConicProblem;
  using conic::Index;
  std::vector<HandInstance> out;
  auto add = [&](std::string name, ConicProblem p, double opt) { out.push_back({std::move(name), std::move(p), opt}); };
  auto ball = [](ConicProblem& p, conic::BlockId x, Index n) {
    std::vector<AffineExpr> u;
    for (Index i = 0; i < n; ++i) {
      u.push_back(p.re(x, i));
      u.push_back(p.im(x, i));
    }
    return u;
  };

  {
    ConicProblem p;
    auto t = p.add_real("t");
    p.add_linear(p.var(t) - 3.0);
    p.maximize(p.var(t));
    add("single bound", std::move(p), 3.0);
  }
  {
    ConicProblem p;  // t <= alpha, 1 + rho >= 2^alpha, rho <= 1
    auto t = p.add_real("t");
    auto a = p.add_real("alpha");
    auto r = p.add_real("rho");
    p.add_linear(p.var(t) - p.var(a));
    p.add_exp2(p.var(a), 1.0 + p.var(r));
    p.add_linear(p.var(r) - 1.0);
    p.maximize(p.var(t));
    add("exponential chain", std::move(p), 1.0);
  }
  {
    ConicProblem p;  // t <= Re(h^H p), ||p||^2 <= 4, h = [1, 0]
    auto t = p.add_real("t");
    auto x = p.add_complex("p", 2);
    p.add_linear(p.var(t) - p.re_inner(vec({1, 0}), x));
    p.add_quadratic(ball(p, x, 2), AffineExpr(-4.0));
    p.maximize(p.var(t));
    add("real beam", std::move(p), 2.0);
  }
  const auto h = vec({{1, 1}, 2, {0, -1}});
  for (bool imag : {false, true}) {
    ConicProblem p;
    auto t = p.add_real("t");
    auto x = p.add_complex("p", 3);
    p.add_linear(p.var(t) - (imag ? p.im_inner(h, x) : p.re_inner(h, x)));
    p.add_soc(ball(p, x, 3), AffineExpr(1.0));
    p.maximize(p.var(t));
    add(imag ? "complex beam, imaginary part" : "complex beam, real part", std::move(p), h.norm());
  }
  {
    ConicProblem p;
    auto x = p.add_real("x");
    auto y = p.add_real("y");
    p.add_linear(p.var(x) - 1.0);
    p.add_linear(p.var(y) - 2.0);
    p.maximize(p.var(x) + p.var(y));
    add("two bounds", std::move(p), 3.0);
  }
  {
    ConicProblem p;
    auto x = p.add_real("x", 1, -1.0, 5.0);
    p.maximize(p.var(x));
    add("box upper", std::move(p), 5.0);
  }
  {
    ConicProblem p;
    auto x = p.add_real("x", 1, -1.0, 5.0);
    p.maximize(-p.var(x));
    add("box lower", std::move(p), 1.0);
  }
  {
    ConicProblem p;  // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3, x, y >= 0
    auto x = p.add_real("x", 1, 0.0);
    auto y = p.add_real("y", 1, 0.0);
    p.add_linear(p.var(x) + p.var(y) - 4.0);
    p.add_linear(p.var(x) + 3.0 * p.var(y) - 6.0);
    p.add_linear(p.var(x) - 3.0);
    p.maximize(3.0 * p.var(x) + 2.0 * p.var(y));
    add("linear program", std::move(p), 11.0);
  }
  {
    ConicProblem p;
    auto t = p.add_real("t");
    auto x = p.add_real("x");
    auto y = p.add_real("y");
    p.add_linear(p.var(t) - p.var(x));
    p.add_linear(p.var(t) - p.var(y));
    p.add_linear(p.var(x) + p.var(y) - 1.0);
    p.maximize(p.var(t));
    add("max-min split", std::move(p), 0.5);
  }
  {
    ConicProblem p;
    auto x = p.add_real("x");
    auto y = p.add_real("y");
    p.add_quadratic({p.var(x), p.var(y)}, AffineExpr(-4.0));
    p.maximize(p.var(x));
    add("disc, one axis", std::move(p), 2.0);
  }
  {
    ConicProblem p;
    auto x = p.add_real("x");
    auto y = p.add_real("y");
    p.add_quadratic({p.var(x), p.var(y)}, AffineExpr(-2.0));
    p.maximize(p.var(x) + p.var(y));
    add("disc, diagonal", std::move(p), 2.0);
  }
  {
    ConicProblem p;  // (x-1)^2 + (y-2)^2 <= 1
    auto x = p.add_real("x");
    auto y = p.add_real("y");
    p.add_quadratic({p.var(x) - 1.0, p.var(y) - 2.0}, AffineExpr(-1.0));
    p.maximize(p.var(x) + p.var(y));
    add("shifted disc", std::move(p), 3.0 + std::sqrt(2.0));
  }
  {
    ConicProblem p;  // ||(x, 1)|| <= 2
    auto x = p.add_real("x");
    p.add_soc({p.var(x), AffineExpr(1.0)}, AffineExpr(2.0));
    p.maximize(p.var(x));
    add("cone with constant entry", std::move(p), std::sqrt(3.0));
  }
  {
    ConicProblem p;  // ||(x, y)|| <= 5, y >= 3
    auto x = p.add_real("x");
    auto y = p.add_real("y");
    p.add_soc({p.var(x), p.var(y)}, AffineExpr(5.0));
    p.add_linear(3.0 - p.var(y));
    p.maximize(p.var(x));
    add("cone with a floor", std::move(p), 4.0);
  }
  {
    ConicProblem p;  // x^2 <= y <= 9
    auto x = p.add_real("x");
    auto y = p.add_real("y");
    p.add_quadratic({p.var(x)}, -p.var(y));
    p.add_linear(p.var(y) - 9.0);
    p.maximize(p.var(x));
    add("parabola epigraph", std::move(p), 3.0);
  }
  {
    ConicProblem p;
    auto t = p.add_real("t");
    p.add_quadratic({p.var(t)}, AffineExpr(-2.0));
    p.maximize(p.var(t));
    add("square root", std::move(p), std::sqrt(2.0));
  }
  {
    ConicProblem p;
    auto e = p.add_real("e");
    p.add_exp2(p.var(e), AffineExpr(8.0));
    p.maximize(p.var(e));
    add("log of eight", std::move(p), 3.0);
  }
  {
    ConicProblem p;
    auto a = p.add_real("a");
    auto b = p.add_real("b");
    p.add_exp2(p.var(a), AffineExpr(4.0));
    p.add_exp2(p.var(b), AffineExpr(2.0));
    p.maximize(p.var(a) + p.var(b));
    add("two logs", std::move(p), 3.0);
  }
  {
    ConicProblem p;  // min x with 2^{-x} <= 4
    auto x = p.add_real("x");
    p.add_exp2(-p.var(x), AffineExpr(4.0));
    p.maximize(-p.var(x));
    add("negated exponent", std::move(p), 2.0);
  }
  {
    ConicProblem p;  // 2^a <= 1 + r, r <= 3
    auto a = p.add_real("a");
    auto r = p.add_real("r");
    p.add_exp2(p.var(a), 1.0 + p.var(r));
    p.add_linear(p.var(r) - 3.0);
    p.maximize(p.var(a));
    add("log through a slack", std::move(p), 2.0);
  }
  {
    // t <= log2(1 + rho), rho <= ||g|| Re(g^H p), ||p|| <= 1: the best beam
    // is g / ||g||, so rho = ||g||^2.
    const auto g = vec({1, {0, 2}});
    ConicProblem p;
    auto t = p.add_real("t");
    auto x = p.add_complex("p", 2);
    auto s = p.add_real("s");
    auto rho = p.add_real("rho", 1, 0.0);
    p.add_linear(p.var(t) - p.var(s));
    p.add_exp2(p.var(s), 1.0 + p.var(rho));
    p.add_soc(ball(p, x, 2), AffineExpr(1.0));
    p.add_linear(p.var(rho) - g.norm() * p.re_inner(g, x));
    p.maximize(p.var(t));
    add("rate through a beam", std::move(p), std::log2(1.0 + g.squaredNorm()));
  }
  {
    // max-min of two users' rates sharing a unit power budget over
    // orthogonal unit channels: each gets half the power, log2(1.5).
    ConicProblem p;
    auto t = p.add_real("t");
    auto a = p.add_real("a", 2);
    auto q = p.add_real("q", 2, 0.0);
    for (Index k = 0; k < 2; ++k) {
      p.add_linear(p.var(t) - p.var(a, k));
      p.add_exp2(p.var(a, k), 1.0 + p.var(q, k));
    }
    p.add_linear(p.var(q, 0) + p.var(q, 1) - 1.0);
    p.maximize(p.var(t));
    add("max-min water level", std::move(p), std::log2(1.5));
  }
  return out;
}

}  // namespace crs::test
