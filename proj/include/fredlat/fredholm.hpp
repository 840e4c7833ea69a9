#pragma once

// The integral operator
//
//   (T phi)(t) = f(t) + lambda * Int_a^b K(t,s) phi(s) ds
//
// discretized with a positive-weight quadrature:
//
//   (T phi)(t_i) = f(t_i) + lambda * Sum_j w_j K(t_i,s_j) phi(s_j),
//
// summed with compensated (Kahan) summation in fixed index order, so the
// result is bit-identical no matter how rows are scheduled.  Positive
// weights keep the discrete operator order-preserving, which is what the
// bracketing solver relies on.  Also houses the hypothesis checker for
// the monotone solvability conditions.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fredlat/expr.hpp"
#include "fredlat/grid.hpp"

namespace fredlat {

/// One problem instance: the interval, lambda, the two expressions, the
/// class constants and the declared solution class.
struct ProblemSpec {
  double a = 0.0;
  double b = 1.0;
  double lambda = 0.0;
  double kappa = 0.0;
  double mu = 0.0;
  double rho = 0.0;
  ExprPtr f_expr;
  ExprPtr K_expr;
  Monotone monotone = Monotone::Preserving;
  Semicontinuity semicontinuity = Semicontinuity::Upper;
  Sign sign = Sign::NonNegative;

  FunctionClass solution_class() const {
    return FunctionClass{monotone, semicontinuity, sign, kappa};
  }
  FunctionClass forcing_class() const {
    return FunctionClass{monotone, semicontinuity, sign, mu};
  }
};

/// Structural validity of a spec (not the solvability hypotheses):
/// a < b, expressions present, and parameter signs consistent with the
/// declared class sign.
inline void validate(const ProblemSpec& spec) {
  if (!(std::isfinite(spec.a) && std::isfinite(spec.b) && spec.a < spec.b))
    throw std::invalid_argument("problem needs finite endpoints with a < b");
  for (double v : {spec.lambda, spec.kappa, spec.mu, spec.rho})
    if (!std::isfinite(v)) throw std::invalid_argument("problem constants must be finite");
  if (!spec.f_expr || !spec.K_expr)
    throw std::invalid_argument("problem is missing f or K");
  if (spec.sign == Sign::NonNegative) {
    if (spec.lambda < 0 || spec.kappa < 0 || spec.mu < 0 || spec.rho < 0)
      throw std::invalid_argument(
          "non-negative classes need lambda, kappa, mu, rho >= 0");
  } else {
    if (spec.lambda > 0 || spec.kappa > 0 || spec.mu > 0 || spec.rho > 0)
      throw std::invalid_argument(
          "non-positive classes need lambda, kappa, mu, rho <= 0");
  }
}

/// Quadrature weights attached to the grid they were built for.  All
/// weights must be non-negative (this is what makes the discretized T
/// order-preserving) and sum to b-a.
struct Quadrature {
  Grid grid;
  std::vector<double> weights;

  Quadrature(Grid g, std::vector<double> w) : grid(g), weights(std::move(w)) {
    if (static_cast<int>(weights.size()) != grid.n)
      throw std::invalid_argument("weight count does not match the grid");
    double sum = 0.0;
    for (double wi : weights) {
      if (!(wi >= 0.0)) throw std::invalid_argument("quadrature weights must be non-negative");
      sum += wi;
    }
    if (std::fabs(sum - (grid.b - grid.a)) > 1e-12)
      throw std::invalid_argument("quadrature weights do not sum to b-a");
  }
};

/// Composite trapezoid rule: w_0 = w_{n-1} = h/2, interior w_i = h.
inline Quadrature trapezoid_weights(const Grid& grid) {
  const double h = grid.spacing();
  std::vector<double> w(static_cast<std::size_t>(grid.n), h);
  w.front() = h / 2.0;
  w.back() = h / 2.0;
  return Quadrature(grid, std::move(w));
}

// ---------------------------------------------------------------------------
// Hypothesis checking

struct HypothesisCheck {
  std::string name;
  bool pass = false;
  std::string detail;
  std::optional<double> witness_t;
  std::optional<double> witness_s;
};

/// Per-condition record of the solvability premises.  Sampling on a grid
/// can refute the continuum conditions but never certify them; a passing
/// check means "not falsified on the sample".
struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  double margin = 0.0;
  std::string sampling_note;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const HypothesisCheck* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

inline double eval_kernel(const ProblemSpec& spec, double t, double s) {
  try {
    return evaluate(spec.K_expr, t, s);
  } catch (const EvalError& e) {
    throw EvalError(std::string(e.what()) + " (K at t = " + std::to_string(t) +
                    ", s = " + std::to_string(s) + ")");
  }
}

inline bool direction_ok(Monotone m, double prev, double next) {
  return m == Monotone::Preserving ? prev <= next : prev >= next;
}

}  // namespace detail

/// Samples f on the grid and K on grid x grid and checks every premise
/// of the monotone solvability theorems: f in its bounded monotone
/// class, K within the rho bound, K monotone in each variable in the
/// class direction, and the margin kappa(1 - lambda*rho) - mu >= 0.
inline HypothesisReport check_hypotheses(const ProblemSpec& spec, const Grid& grid) {
  HypothesisReport report;
  report.sampling_note =
      "checks sample the grid; they can refute the continuum hypotheses "
      "(including continuity of K) but not certify them";

  const FunctionClass f_class = spec.forcing_class();
  const GridFunction f = sample(spec.f_expr, grid, sample_side_for(f_class));

  {
    HypothesisCheck c{"f_in_class", true, "f is monotone in the class direction and within bounds", {}, {}};
    const double lo = f_class.sign == Sign::NonNegative ? 0.0 : f_class.bound;
    const double hi = f_class.sign == Sign::NonNegative ? f_class.bound : 0.0;
    for (int i = 0; i < grid.n && c.pass; ++i) {
      if (!(lo <= f[i] && f[i] <= hi)) {
        c.pass = false;
        c.detail = "f(t) = " + std::to_string(f[i]) + " escapes [" + std::to_string(lo) +
                   ", " + std::to_string(hi) + "]";
        c.witness_t = grid.node(i);
      } else if (i > 0 && !detail::direction_ok(spec.monotone, f[i - 1], f[i])) {
        c.pass = false;
        c.detail = "f is not monotone in the declared direction";
        c.witness_t = grid.node(i);
      }
    }
    report.checks.push_back(std::move(c));
  }

  HypothesisCheck bounded{"K_bounded_by_rho", true, "0 <= K <= rho on the sample", {}, {}};
  HypothesisCheck mono_t{"K_monotone_in_t", true, "K is monotone in t for every sampled s", {}, {}};
  HypothesisCheck mono_s{"K_monotone_in_s", true, "K is monotone in s for every sampled t", {}, {}};
  if (spec.sign == Sign::NonPositive) bounded.detail = "rho <= K <= 0 on the sample";

  const double klo = spec.sign == Sign::NonNegative ? 0.0 : spec.rho;
  const double khi = spec.sign == Sign::NonNegative ? spec.rho : 0.0;
  std::vector<double> prev_row;
  std::vector<double> row(static_cast<std::size_t>(grid.n));
  for (int i = 0; i < grid.n; ++i) {
    const double t = grid.node(i);
    for (int j = 0; j < grid.n; ++j) {
      const double v = detail::eval_kernel(spec, t, grid.node(j));
      row[static_cast<std::size_t>(j)] = v;
      if (bounded.pass && !(klo <= v && v <= khi)) {
        bounded.pass = false;
        bounded.detail = "K = " + std::to_string(v) + " escapes [" + std::to_string(klo) +
                         ", " + std::to_string(khi) + "]";
        bounded.witness_t = t;
        bounded.witness_s = grid.node(j);
      }
      if (mono_s.pass && j > 0 &&
          !detail::direction_ok(spec.monotone, row[static_cast<std::size_t>(j - 1)], v)) {
        mono_s.pass = false;
        mono_s.detail = "K is not monotone in s in the declared direction";
        mono_s.witness_t = t;
        mono_s.witness_s = grid.node(j);
      }
      if (mono_t.pass && i > 0 &&
          !detail::direction_ok(spec.monotone, prev_row[static_cast<std::size_t>(j)], v)) {
        mono_t.pass = false;
        mono_t.detail = "K is not monotone in t in the declared direction";
        mono_t.witness_t = t;
        mono_t.witness_s = grid.node(j);
      }
    }
    std::swap(prev_row, row);
    row.resize(static_cast<std::size_t>(grid.n));
  }
  report.checks.push_back(std::move(bounded));
  report.checks.push_back(std::move(mono_t));
  report.checks.push_back(std::move(mono_s));

  // kappa(1 - lambda*rho) >= mu, written so that the reflected
  // (non-positive) form of the condition yields the same margin.  The
  // inequality is not strict, so an equality case that rounds a hair
  // below zero still counts as satisfied.
  report.margin = spec.sign == Sign::NonNegative
                      ? spec.kappa * (1.0 - spec.lambda * spec.rho) - spec.mu
                      : spec.mu - spec.kappa * (1.0 - spec.lambda * spec.rho);
  HypothesisCheck m{"margin_nonneg", report.margin >= -1e-12,
                    "kappa*(1 - lambda*rho) - mu = " + std::to_string(report.margin), {}, {}};
  report.checks.push_back(std::move(m));
  return report;
}

// ---------------------------------------------------------------------------
// The discretized operator

namespace detail {

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double term) {
    const double y = term - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace detail

/// T assembled once for a (spec, quadrature) pair: f sampled on the
/// nodes (with the one-sided convention of the declared class) and the
/// kernel tabulated on grid x grid.  apply() is then a weighted
/// matrix-vector product.
class DiscretizedOperator {
public:
  DiscretizedOperator(const ProblemSpec& spec, const Quadrature& quad)
      : grid_(quad.grid),
        lambda_(spec.lambda),
        weights_(quad.weights),
        f_(sample(spec.f_expr, quad.grid, sample_side_for(spec.solution_class()))),
        kernel_(static_cast<std::size_t>(quad.grid.n) * static_cast<std::size_t>(quad.grid.n)) {
    const int n = grid_.n;
    for (int i = 0; i < n; ++i) {
      const double t = grid_.node(i);
      for (int j = 0; j < n; ++j)
        kernel_[static_cast<std::size_t>(i) * n + j] = detail::eval_kernel(spec, t, grid_.node(j));
    }
  }

  const Grid& grid() const { return grid_; }
  const GridFunction& f_samples() const { return f_; }
  double lambda() const { return lambda_; }
  double kernel(int i, int j) const {
    return kernel_[static_cast<std::size_t>(i) * grid_.n + j];
  }
  double weight(int j) const { return weights_[static_cast<std::size_t>(j)]; }

  GridFunction apply(const GridFunction& phi) const {
    if (!(phi.grid() == grid_))
      throw std::invalid_argument("grid function does not match the operator's grid");
    const int n = grid_.n;
    std::vector<double> out(static_cast<std::size_t>(n));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < n; ++i) {
      detail::KahanSum acc;
      const double* krow = kernel_.data() + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) acc.add(weights_[static_cast<std::size_t>(j)] * krow[j] * phi[j]);
      out[static_cast<std::size_t>(i)] = f_[i] + lambda_ * acc.sum;
    }
    return GridFunction(grid_, std::move(out));
  }

private:
  Grid grid_;
  double lambda_;
  std::vector<double> weights_;
  GridFunction f_;
  std::vector<double> kernel_;
};

/// One-shot application of T; assembles the operator on the fly.  Use
/// DiscretizedOperator directly when applying T repeatedly.
inline GridFunction apply_T(const ProblemSpec& spec, const GridFunction& phi,
                            const Quadrature& quad) {
  return DiscretizedOperator(spec, quad).apply(phi);
}

}  // namespace fredlat
