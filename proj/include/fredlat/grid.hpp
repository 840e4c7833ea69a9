#pragma once

// The discretized function lattice: real-valued functions sampled on a
// uniform grid over [a,b], ordered pointwise.  Monotone bounded classes
// are represented by their node values; semicontinuity of a monotone
// function reduces to one-sided continuity, which at grid scale is a
// sampling convention (see sample_side_for), not a verified property.

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fredlat/expr.hpp"

namespace fredlat {

/// Uniform grid of n nodes t_i = a + i*(b-a)/(n-1) on [a,b].
struct Grid {
  double a;
  double b;
  int n;

  Grid(double a_, double b_, int n_) : a(a_), b(b_), n(n_) {
    if (!(std::isfinite(a) && std::isfinite(b)) || !(a < b))
      throw std::invalid_argument("grid needs finite endpoints with a < b");
    if (n < 2) throw std::invalid_argument("grid needs at least two nodes");
  }

  double node(int i) const { return a + i * (b - a) / (n - 1); }
  double spacing() const { return (b - a) / (n - 1); }

  bool operator==(const Grid& o) const { return a == o.a && b == o.b && n == o.n; }
};

/// One function on a grid; values are finite by construction.
class GridFunction {
public:
  GridFunction(Grid grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.n)
      throw std::invalid_argument("value count does not match the grid");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("grid function value is not finite");
  }

  static GridFunction constant(const Grid& grid, double value) {
    return GridFunction(grid, std::vector<double>(static_cast<std::size_t>(grid.n), value));
  }

  const Grid& grid() const { return grid_; }
  int size() const { return grid_.n; }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return values_; }

private:
  Grid grid_;
  std::vector<double> values_;
};

enum class Monotone { Preserving, Reversing };
enum class Semicontinuity { Upper, Lower };
enum class Sign { NonNegative, NonPositive };

/// A bounded monotone class of grid functions: order-preserving or
/// order-reversing, upper or lower semicontinuous, and either
/// non-negative with upper bound `bound` (>= 0) or non-positive with
/// lower bound `bound` (<= 0).
struct FunctionClass {
  Monotone monotone;
  Semicontinuity semicontinuity;
  Sign sign;
  double bound;

  FunctionClass(Monotone m, Semicontinuity sc, Sign sg, double k)
      : monotone(m), semicontinuity(sc), sign(sg), bound(k) {
    if (!std::isfinite(k)) throw std::invalid_argument("class bound must be finite");
    if (sg == Sign::NonNegative && k < 0)
      throw std::invalid_argument("non-negative class needs bound >= 0");
    if (sg == Sign::NonPositive && k > 0)
      throw std::invalid_argument("non-positive class needs bound <= 0");
  }

  /// Constant function at the lattice top / bottom of the class.
  double top_value() const { return sign == Sign::NonNegative ? bound : 0.0; }
  double bottom_value() const { return sign == Sign::NonNegative ? 0.0 : bound; }
};

namespace detail {

inline void require_same_grid(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid() == g.grid()))
    throw std::invalid_argument("grid functions live on different grids");
}

}  // namespace detail

/// Pointwise partial order: phi <= psi at every node.
inline bool leq(const GridFunction& phi, const GridFunction& psi) {
  detail::require_same_grid(phi, psi);
  for (int i = 0; i < phi.size(); ++i)
    if (!(phi[i] <= psi[i])) return false;
  return true;
}

/// True iff the values are monotone in the class direction and inside
/// the class bounds at every node.  Comparisons are exact.
inline bool in_class(const GridFunction& phi, const FunctionClass& cls) {
  const double lo = cls.sign == Sign::NonNegative ? 0.0 : cls.bound;
  const double hi = cls.sign == Sign::NonNegative ? cls.bound : 0.0;
  for (int i = 0; i < phi.size(); ++i) {
    if (!(lo <= phi[i] && phi[i] <= hi)) return false;
    if (i > 0) {
      if (cls.monotone == Monotone::Preserving && !(phi[i - 1] <= phi[i])) return false;
      if (cls.monotone == Monotone::Reversing && !(phi[i - 1] >= phi[i])) return false;
    }
  }
  return true;
}

/// Nodewise infimum of a set of class members.  The empty set yields the
/// class top (the constant at the class bound for non-negative classes),
/// so that every subset of the class lattice has an infimum in it.
inline GridFunction pointwise_inf(const Grid& grid, std::span<const GridFunction> fs,
                                  const FunctionClass& cls) {
  std::vector<double> acc(static_cast<std::size_t>(grid.n), cls.top_value());
  for (std::size_t k = 0; k < fs.size(); ++k) {
    if (!(fs[k].grid() == grid))
      throw std::invalid_argument("grid functions live on different grids");
    if (!in_class(fs[k], cls))
      throw std::invalid_argument("set member " + std::to_string(k) +
                                  " is outside the declared class");
    for (int i = 0; i < grid.n; ++i) acc[static_cast<std::size_t>(i)] =
        std::fmin(acc[static_cast<std::size_t>(i)], fs[k][i]);
  }
  return GridFunction(grid, std::move(acc));
}

/// Nodewise supremum; the empty set yields the class bottom.
inline GridFunction pointwise_sup(const Grid& grid, std::span<const GridFunction> fs,
                                  const FunctionClass& cls) {
  std::vector<double> acc(static_cast<std::size_t>(grid.n), cls.bottom_value());
  for (std::size_t k = 0; k < fs.size(); ++k) {
    if (!(fs[k].grid() == grid))
      throw std::invalid_argument("grid functions live on different grids");
    if (!in_class(fs[k], cls))
      throw std::invalid_argument("set member " + std::to_string(k) +
                                  " is outside the declared class");
    for (int i = 0; i < grid.n; ++i) acc[static_cast<std::size_t>(i)] =
        std::fmax(acc[static_cast<std::size_t>(i)], fs[k][i]);
  }
  return GridFunction(grid, std::move(acc));
}

/// Which one-sided limit represents a class at piecewise jumps: a
/// nondecreasing function is upper semicontinuous iff right-continuous,
/// a nonincreasing one iff left-continuous, and dually for lower
/// semicontinuity.
inline LimitSide sample_side_for(const FunctionClass& cls) {
  const bool right = (cls.monotone == Monotone::Preserving) ==
                     (cls.semicontinuity == Semicontinuity::Upper);
  return right ? LimitSide::Right : LimitSide::Left;
}

/// Samples a t-expression on the grid.  `side` controls which one-sided
/// limit piecewise guards represent at interior nodes; endpoints are
/// always evaluated as written.  Evaluation failures carry the node.
inline GridFunction sample(const ExprPtr& expr, const Grid& grid,
                           LimitSide side = LimitSide::None) {
  std::vector<double> v(static_cast<std::size_t>(grid.n));
  for (int i = 0; i < grid.n; ++i) {
    const LimitSide node_side = (i == 0 || i == grid.n - 1) ? LimitSide::None : side;
    try {
      v[static_cast<std::size_t>(i)] = evaluate(expr, grid.node(i), std::nullopt, node_side);
    } catch (const EvalError& e) {
      throw EvalError(std::string(e.what()) + " (node " + std::to_string(i) + ", t = " +
                      std::to_string(grid.node(i)) + ")");
    }
  }
  return GridFunction(grid, std::move(v));
}

/// Sup-norm distance between two functions on one grid.
inline double sup_diff(const GridFunction& f, const GridFunction& g) {
  detail::require_same_grid(f, g);
  double acc = 0.0;
  for (int i = 0; i < f.size(); ++i) acc = std::fmax(acc, std::fabs(f[i] - g[i]));
  return acc;
}

inline double sup_norm(const GridFunction& f) {
  double acc = 0.0;
  for (int i = 0; i < f.size(); ++i) acc = std::fmax(acc, std::fabs(f[i]));
  return acc;
}

// ---------------------------------------------------------------------------
// CSV serialization: "t,value" rows with 17 significant digits, which
// round-trips doubles exactly.

namespace detail {

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_csv(const GridFunction& f, std::ostream& out) {
  out << "t,value\n";
  for (int i = 0; i < f.size(); ++i)
    out << detail::format_full(f.grid().node(i)) << ',' << detail::format_full(f[i]) << '\n';
}

/// Reads a "t,value" CSV written by write_csv; the grid is reconstructed
/// from the first/last node and the row count.
inline GridFunction read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,value")
    throw std::invalid_argument("expected header 't,value'");
  std::vector<double> ts, vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("malformed CSV row: " + line);
    ts.push_back(std::stod(line.substr(0, comma)));
    vs.push_back(std::stod(line.substr(comma + 1)));
  }
  if (ts.size() < 2) throw std::invalid_argument("CSV needs at least two rows");
  const Grid grid(ts.front(), ts.back(), static_cast<int>(ts.size()));
  return GridFunction(grid, std::move(vs));
}

}  // namespace fredlat
