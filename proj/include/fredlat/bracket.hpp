#pragma once

// Bracketing iteration for the extremal solutions.  The fixed points of
// the discretized operator T form a non-empty complete sublattice of the
// bounded monotone class (T is an order-preserving self-map of it when
// the hypotheses hold), and the extremal ones are
//
//   phi_* = inf{phi : T phi <= phi},   phi^* = sup{phi : phi <= T phi}.
//
// Those formulas select elements, they do not compute them; the solver
// reaches them by Kleene-style iteration instead.  Ascending from the
// class bottom produces a nodewise nondecreasing sequence whose limit is
// the least fixed point of the discrete T, and descending from the class
// top dually reaches the greatest one: the discretized operator is a
// finite-dimensional monotone map, continuous in each node value, so the
// monotone limits are themselves fixed points.  Every low iterate lies
// below every solution and every high iterate above, so the pair always
// brackets the whole solution set; when the contraction ratio
// q = |lambda| rho (b-a) is below one, the bracket collapses and the
// solution is unique.
//
// Non-positive problems (lambda <= 0) are handled by reflecting to the
// equivalent non-negative problem, iterating there, and reflecting the
// results back; reflection swaps the roles of the two extremal
// solutions.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fredlat/conjugate.hpp"
#include "fredlat/fredholm.hpp"
#include "fredlat/grid.hpp"

namespace fredlat {

struct SolverConfig {
  double tol = 1e-9;
  int max_iter = 10000;
  bool force = false;         // iterate even when the hypotheses fail
  bool record_trace = false;  // collect per-step diffs and gap

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  }
};

struct TraceRow {
  int k;
  double residual_low;
  double residual_high;
  double gap;
};

struct SolveResult {
  GridFunction phi_min;  // limit from below: approximates the minimum solution
  GridFunction phi_max;  // limit from above: approximates the maximum solution
  int iterations_low = 0;
  int iterations_high = 0;
  double residual_low = 0.0;
  double residual_high = 0.0;
  double bracket_gap = 0.0;
  double contraction_ratio = 0.0;
  bool unique = false;
  bool converged = false;
  bool reflected = false;  // solved via the reflected problem
  HypothesisReport hypotheses;
  std::vector<TraceRow> trace;
};

/// Refusal to iterate: the hypotheses failed and `force` was not set.
class HypothesesError : public std::runtime_error {
public:
  explicit HypothesesError(HypothesisReport report)
      : std::runtime_error("hypotheses failed; refusing to iterate (use force to override)"),
        report_(std::move(report)) {}
  const HypothesisReport& report() const { return report_; }

private:
  HypothesisReport report_;
};

/// A forced (or numerically pathological) run broke the iteration
/// structure: an iterate escaped the class or the bracket inverted.
class IterationBreakdown : public std::runtime_error {
  using std::runtime_error::runtime_error;

public:
  explicit IterationBreakdown(const std::string& what) : std::runtime_error(what) {}
};

/// q = |lambda| * |rho| * (b - a); below one the discretized operator is
/// a sup-norm contraction, the discrete solution is unique and the
/// bracket gap is expected to collapse to the tolerance.
inline double uniqueness_margin(const ProblemSpec& spec) {
  return std::fabs(spec.lambda) * std::fabs(spec.rho) * (spec.b - spec.a);
}

struct Certificate {
  bool prefixed;   // T phi <= phi: phi belongs to the defining set of phi_*
  bool postfixed;  // phi <= T phi: phi belongs to the defining set of phi^*
  double residual;
};

/// Nodewise pre/post-fixed-point test plus the sup-norm residual of phi
/// under T.
inline Certificate certify(const ProblemSpec& spec, const GridFunction& phi,
                           const Quadrature& quad) {
  const GridFunction image = apply_T(spec, phi, quad);
  return Certificate{leq(image, phi), leq(phi, image), sup_diff(image, phi)};
}

namespace detail {

struct SequenceState {
  GridFunction value;
  int applies = 0;
  double last_diff = 0.0;
  double residual = 0.0;
  bool done = false;
};

inline void check_iterate(const GridFunction& next, const FunctionClass& cls,
                          const GridFunction& prev, bool ascending, const char* label) {
  if (!in_class(next, cls))
    throw IterationBreakdown(std::string(label) +
                             " iterate escaped the class (bound or monotonicity violated); "
                             "the self-map structure does not hold for this problem");
  const bool ordered = ascending ? leq(prev, next) : leq(next, prev);
  if (!ordered)
    throw IterationBreakdown(std::string(label) + " sequence lost its monotone progression");
}

/// One bracketing run on a non-negative-class spec.
inline SolveResult solve_core(const ProblemSpec& spec, const Quadrature& quad,
                              const SolverConfig& cfg, HypothesisReport report) {
  const Grid& grid = quad.grid;
  const FunctionClass cls = spec.solution_class();
  const DiscretizedOperator op(spec, quad);

  // lambda = 0 (or rho = 0 with valid hypotheses, forcing K == 0) makes
  // T constant: phi = f is the unique solution, reached in one step.
  if (spec.lambda == 0.0 || (spec.rho == 0.0 && report.all_pass())) {
    SolveResult result{op.f_samples(), op.f_samples()};
    result.iterations_low = result.iterations_high = 1;
    result.residual_low = sup_diff(op.apply(op.f_samples()), op.f_samples());
    result.residual_high = result.residual_low;
    result.bracket_gap = 0.0;
    result.contraction_ratio = uniqueness_margin(spec);
    result.unique = true;
    result.converged = true;
    result.hypotheses = std::move(report);
    if (cfg.record_trace)
      result.trace.push_back(TraceRow{1, result.residual_low, result.residual_high, 0.0});
    return result;
  }

  SequenceState low{GridFunction::constant(grid, cls.bottom_value())};
  SequenceState high{GridFunction::constant(grid, cls.top_value())};

  std::vector<TraceRow> trace;
  const auto advance = [&](SequenceState& seq, bool ascending, const char* label) {
    GridFunction next = op.apply(seq.value);
    ++seq.applies;
    check_iterate(next, cls, seq.value, ascending, label);
    const double diff = sup_diff(next, seq.value);
    if (diff <= cfg.tol) {
      // Successive-difference stopping plus a residual confirmation:
      // near-one contraction ratios can make consecutive iterates close
      // long before the residual is small.
      GridFunction probe = op.apply(next);
      ++seq.applies;
      check_iterate(probe, cls, next, ascending, label);
      const double residual = sup_diff(probe, next);
      if (residual <= 2.0 * cfg.tol) {
        seq.value = std::move(next);
        seq.residual = residual;
        seq.last_diff = diff;
        seq.done = true;
        return;
      }
      seq.value = std::move(probe);
      seq.last_diff = residual;
      return;
    }
    seq.value = std::move(next);
    seq.last_diff = diff;
  };

  int joint_step = 0;
  while (true) {
    const bool low_live = !low.done && low.applies < cfg.max_iter;
    const bool high_live = !high.done && high.applies < cfg.max_iter;
    if (!low_live && !high_live) break;
    ++joint_step;
    if (low_live) advance(low, /*ascending=*/true, "ascending");
    if (high_live) advance(high, /*ascending=*/false, "descending");
    if (!leq(low.value, high.value))
      throw IterationBreakdown("bracket inverted: the ascending iterate overtook the "
                               "descending one");
    if (cfg.record_trace)
      trace.push_back(TraceRow{joint_step, low_live ? low.last_diff : 0.0,
                               high_live ? high.last_diff : 0.0,
                               sup_diff(high.value, low.value)});
  }

  SolveResult result{low.value, high.value};
  result.iterations_low = low.applies;
  result.iterations_high = high.applies;
  result.residual_low = low.done ? low.residual : sup_diff(op.apply(low.value), low.value);
  result.residual_high = high.done ? high.residual : sup_diff(op.apply(high.value), high.value);
  result.bracket_gap = sup_diff(result.phi_max, result.phi_min);
  result.contraction_ratio = uniqueness_margin(spec);
  result.converged = low.done && high.done;
  result.unique = result.converged && result.contraction_ratio < 1.0 &&
                  result.bracket_gap <= 10.0 * cfg.tol;
  result.hypotheses = std::move(report);
  result.trace = std::move(trace);
  return result;
}

}  // namespace detail

/// Computes both extremal solutions by monotone bracketing.  Refuses to
/// run when the hypotheses fail unless cfg.force is set; a forced run
/// aborts with IterationBreakdown as soon as an iterate leaves the class
/// or the bracket inverts.  Hitting max_iter returns the partial result
/// with converged = false.
inline SolveResult solve(const ProblemSpec& spec, const Quadrature& quad,
                         const SolverConfig& cfg = {}) {
  validate(spec);
  cfg.validate();
  HypothesisReport report = check_hypotheses(spec, quad.grid);
  if (!report.all_pass() && !cfg.force) throw HypothesesError(std::move(report));

  if (spec.sign == Sign::NonNegative)
    return detail::solve_core(spec, quad, cfg, std::move(report));

  // Non-positive problem: solve the reflected non-negative one and map
  // the solutions back.  Negation reverses the order, so the reflected
  // maximum becomes the original minimum and vice versa.  The mirrored
  // hypotheses pass exactly when the original ones do, so the original
  // report stands in for them.
  const ProblemSpec mirrored = reflect_problem(spec);
  SolveResult r = detail::solve_core(mirrored, quad, cfg, report);
  SolveResult result{reflect_solution(r.phi_max), reflect_solution(r.phi_min)};
  result.iterations_low = r.iterations_high;
  result.iterations_high = r.iterations_low;
  result.residual_low = r.residual_high;
  result.residual_high = r.residual_low;
  result.bracket_gap = r.bracket_gap;
  result.contraction_ratio = r.contraction_ratio;
  result.unique = r.unique;
  result.converged = r.converged;
  result.reflected = true;
  result.hypotheses = std::move(report);
  for (TraceRow& row : r.trace) std::swap(row.residual_low, row.residual_high);
  result.trace = std::move(r.trace);
  return result;
}

}  // namespace fredlat
