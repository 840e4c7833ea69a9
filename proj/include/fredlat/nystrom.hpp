#pragma once

// Independent classical solver used to cross-check the bracketing
// iteration: collocate the equation at the nodes,
//
//   (I - lambda * K W) v = f,    (K W)_{ij} = K(t_i, s_j) w_j,
//
// and solve the dense system by row-pivoted LU.  By default it shares
// the trapezoid rule with the lattice solver, so both discretizations
// have the same fixed point and any disagreement isolates iteration
// error.  A Gauss-Legendre variant exists for continuum-accuracy
// studies of smooth problems.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fredlat/fredholm.hpp"
#include "fredlat/grid.hpp"

namespace fredlat {

/// Pivot collapsed below 1e-14 * ||A||_inf: lambda sits at (or next to) a
/// characteristic value of the kernel and the collocation matrix is
/// numerically singular.
class SingularSystemError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct DenseSystem {
  Grid grid;
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
};

/// A_ij = delta_ij - lambda * w_j * K(t_i, s_j); rhs = f at the nodes.
inline DenseSystem assemble(const ProblemSpec& spec, const Quadrature& quad) {
  const Grid& grid = quad.grid;
  const int n = grid.n;
  DenseSystem sys{grid, Eigen::MatrixXd(n, n), Eigen::VectorXd(n)};
  const GridFunction f = sample(spec.f_expr, grid, sample_side_for(spec.solution_class()));
  for (int i = 0; i < n; ++i) {
    sys.rhs(i) = f[i];
    const double t = grid.node(i);
    for (int j = 0; j < n; ++j) {
      const double k = detail::eval_kernel(spec, t, grid.node(j));
      sys.matrix(i, j) = (i == j ? 1.0 : 0.0) -
                         spec.lambda * quad.weights[static_cast<std::size_t>(j)] * k;
    }
  }
  return sys;
}

/// Row-pivoted Gaussian elimination with an explicit residual check:
/// the returned v satisfies ||A v - rhs||_inf <= 1e-10 * (1 + ||rhs||_inf).
inline GridFunction solve_linear(const DenseSystem& sys) {
  if (sys.matrix.rows() != sys.matrix.cols() || sys.matrix.rows() != sys.rhs.size())
    throw std::invalid_argument("system dimensions are inconsistent");
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.matrix);
  const double scale = sys.matrix.cwiseAbs().rowwise().sum().maxCoeff();
  const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (pivot_min < 1e-14 * scale)
    throw SingularSystemError(
        "collocation matrix is numerically singular (pivot " + std::to_string(pivot_min) +
        " below 1e-14 * ||A||_inf); lambda is at or near a characteristic value");
  const Eigen::VectorXd v = lu.solve(sys.rhs);
  const double residual = (sys.matrix * v - sys.rhs).lpNorm<Eigen::Infinity>();
  if (residual > 1e-10 * (1.0 + sys.rhs.lpNorm<Eigen::Infinity>()))
    throw std::runtime_error("linear solve residual exceeded its tolerance");
  return GridFunction(sys.grid, std::vector<double>(v.data(), v.data() + v.size()));
}

/// Assemble-and-solve on the lattice solver's own quadrature.
inline GridFunction nystrom_solve(const ProblemSpec& spec, const Quadrature& quad) {
  return solve_linear(assemble(spec, quad));
}

// ---------------------------------------------------------------------------
// Gauss-Legendre variant

/// Nodes and weights of the m-point Gauss-Legendre rule on [a,b]:
/// exact for polynomials of degree <= 2m-1.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussLegendreRule gauss_legendre(double a, double b, int m) {
  if (m < 1) throw std::invalid_argument("Gauss-Legendre needs at least one node");
  if (!(a < b)) throw std::invalid_argument("Gauss-Legendre needs a < b");
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(m));
  rule.weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    // Newton iteration on P_m from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::fabs(step) < 1e-15) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] =
        0.5 * (a + b) + 0.5 * (b - a) * x;
    rule.weights[static_cast<std::size_t>(i)] =
        (b - a) / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

/// Solves at the Gauss-Legendre points and extends to `eval_grid`
/// through the natural interpolant phi(t) = f(t) + lambda Sum_j w_j
/// K(t,x_j) z_j.
inline GridFunction nystrom_solve_gauss(const ProblemSpec& spec, int m,
                                        const Grid& eval_grid) {
  const GaussLegendreRule rule = gauss_legendre(spec.a, spec.b, m);
  const LimitSide side = sample_side_for(spec.solution_class());

  Eigen::MatrixXd A(m, m);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) {
    const double x = rule.nodes[static_cast<std::size_t>(i)];
    rhs(i) = evaluate(spec.f_expr, x, std::nullopt, side);
    for (int j = 0; j < m; ++j)
      A(i, j) = (i == j ? 1.0 : 0.0) -
                spec.lambda * rule.weights[static_cast<std::size_t>(j)] *
                    detail::eval_kernel(spec, x, rule.nodes[static_cast<std::size_t>(j)]);
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double scale = A.cwiseAbs().rowwise().sum().maxCoeff();
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() < 1e-14 * scale)
    throw SingularSystemError("Gauss-Legendre collocation matrix is numerically singular");
  const Eigen::VectorXd z = lu.solve(rhs);

  const GridFunction f = sample(spec.f_expr, eval_grid, side);
  std::vector<double> out(static_cast<std::size_t>(eval_grid.n));
  for (int i = 0; i < eval_grid.n; ++i) {
    detail::KahanSum acc;
    const double t = eval_grid.node(i);
    for (int j = 0; j < m; ++j)
      acc.add(rule.weights[static_cast<std::size_t>(j)] *
              detail::eval_kernel(spec, t, rule.nodes[static_cast<std::size_t>(j)]) * z(j));
    out[static_cast<std::size_t>(i)] = f[i] + spec.lambda * acc.sum;
  }
  return GridFunction(eval_grid, std::move(out));
}

}  // namespace fredlat
