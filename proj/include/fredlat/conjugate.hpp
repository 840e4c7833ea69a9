#pragma once

// Reflection transform between non-negative and non-positive problems:
// negate lambda, kappa, mu, rho, f, K and flip the class (order
// direction, semicontinuity, sign).  phi solves the original discrete
// equation exactly when -phi solves the reflected one; the two residuals
// agree bit for bit because IEEE negation is exact.  Applying the
// transform twice returns the original spec.

#include <variant>

#include "fredlat/fredholm.hpp"

namespace fredlat {

/// Expression-level negation.  Unwraps an outer negation instead of
/// stacking a second one, so the transform is an involution on ASTs.
inline ExprPtr negated(const ExprPtr& e) {
  if (const auto* n = std::get_if<NegateNode>(&e->node())) return n->operand;
  return make_negate(e);
}

inline Monotone flipped(Monotone m) {
  return m == Monotone::Preserving ? Monotone::Reversing : Monotone::Preserving;
}
inline Semicontinuity flipped(Semicontinuity s) {
  return s == Semicontinuity::Upper ? Semicontinuity::Lower : Semicontinuity::Upper;
}
inline Sign flipped(Sign s) {
  return s == Sign::NonNegative ? Sign::NonPositive : Sign::NonNegative;
}

/// The reflected problem: lambda' = -lambda, kappa' = -kappa, mu' = -mu,
/// rho' = -rho, f' = -f, K' = -K, class flipped in all three aspects.
inline ProblemSpec reflect_problem(const ProblemSpec& spec) {
  ProblemSpec r = spec;
  r.lambda = -spec.lambda;
  r.kappa = -spec.kappa;
  r.mu = -spec.mu;
  r.rho = -spec.rho;
  r.f_expr = negated(spec.f_expr);
  r.K_expr = negated(spec.K_expr);
  r.monotone = flipped(spec.monotone);
  r.semicontinuity = flipped(spec.semicontinuity);
  r.sign = flipped(spec.sign);
  return r;
}

/// Solutions transport by nodewise negation.
inline GridFunction reflect_solution(const GridFunction& phi) {
  std::vector<double> v(phi.values());
  for (double& x : v) x = -x;
  return GridFunction(phi.grid(), std::move(v));
}

inline bool specs_equal(const ProblemSpec& x, const ProblemSpec& y) {
  return x.a == y.a && x.b == y.b && x.lambda == y.lambda && x.kappa == y.kappa &&
         x.mu == y.mu && x.rho == y.rho && x.monotone == y.monotone &&
         x.semicontinuity == y.semicontinuity && x.sign == y.sign &&
         structurally_equal(x.f_expr, y.f_expr) && structurally_equal(x.K_expr, y.K_expr);
}

}  // namespace fredlat
