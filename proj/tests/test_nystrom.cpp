#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fredlat/bracket.hpp"
#include "fredlat/nystrom.hpp"
#include "spec_samples.hpp"

using namespace fredlat;
using namespace fredlat::testing;

TEST_CASE("assemble") {
  SECTION("lambda = 0 gives the identity") {
    const auto spec = make_spec(0.0, 1.0, 0.0, 2.0, 1.0, 1.0, "t", "1");
    const auto quad = trapezoid_weights(Grid(0.0, 1.0, 5));
    const auto sys = assemble(spec, quad);
    REQUIRE(sys.matrix.isIdentity(0.0));
  }
  SECTION("K == 1, lambda = 1/2 with two nodes") {
    const auto spec = constant_spec();
    const auto quad = trapezoid_weights(Grid(0.0, 1.0, 2));
    const auto sys = assemble(spec, quad);
    REQUIRE(sys.matrix(0, 0) == 0.75);
    REQUIRE(sys.matrix(0, 1) == -0.25);
    REQUIRE(sys.matrix(1, 0) == -0.25);
    REQUIRE(sys.matrix(1, 1) == 0.75);
    REQUIRE(sys.rhs(0) == 1.0);
    REQUIRE(sys.rhs(1) == 1.0);
  }
  SECTION("worked example: the t = 0 row is a unit row since K(0,s) = 0") {
    const auto spec = example_spec();
    const auto quad = trapezoid_weights(Grid(0.0, 1.0, 11));
    const auto sys = assemble(spec, quad);
    for (int j = 0; j < 11; ++j)
      REQUIRE(sys.matrix(0, j) == (j == 0 ? 1.0 : 0.0));
  }
}

TEST_CASE("solve_linear") {
  SECTION("identity system returns the right-hand side") {
    const auto spec = make_spec(0.0, 1.0, 0.0, 2.0, 1.0, 1.0, "t", "1");
    const auto quad = trapezoid_weights(Grid(0.0, 1.0, 9));
    const auto v = solve_linear(assemble(spec, quad));
    const auto f = sample(spec.f_expr, quad.grid);
    REQUIRE(v.values() == f.values());
  }
  SECTION("K == 1, f == 1, lambda = 1/2 gives the constant 2") {
    const auto quad = trapezoid_weights(Grid(0.0, 1.0, 101));
    const auto v = solve_linear(assemble(constant_spec(), quad));
    for (int i = 0; i < v.size(); ++i)
      REQUIRE(v[i] == Catch::Approx(2.0).margin(1e-12));
  }
  SECTION("separable kernel at n = 1001 matches 6t/5 to trapezoid accuracy") {
    const auto quad = trapezoid_weights(Grid(0.0, 1.0, 1001));
    const auto v = solve_linear(assemble(separable_spec(), quad));
    double err = 0.0;
    for (int i = 0; i < v.size(); ++i)
      err = std::fmax(err, std::fabs(v[i] - 1.2 * quad.grid.node(i)));
    REQUIRE(err <= 1e-6);
  }
  SECTION("lambda at a characteristic value is reported singular") {
    // K == 1 on [0,1]: the integral operator fixes constants, so
    // lambda = 1 makes I - lambda*KW singular.
    const auto spec = make_spec(0.0, 1.0, 1.0, 10.0, 1.0, 1.0, "1", "1");
    const auto quad = trapezoid_weights(Grid(0.0, 1.0, 21));
    REQUIRE_THROWS_AS(solve_linear(assemble(spec, quad)), SingularSystemError);
  }
  SECTION("the solve residual honors its contract") {
    std::mt19937_64 rng(12);
    const auto quad = trapezoid_weights(Grid(0.0, 1.0, 101));
    for (int it = 0; it < 5; ++it) {
      const auto spec = random_class_spec(rng);
      const auto sys = assemble(spec, quad);
      const auto v = solve_linear(sys);
      Eigen::VectorXd vv = Eigen::Map<const Eigen::VectorXd>(v.values().data(), v.size());
      const double resid = (sys.matrix * vv - sys.rhs).lpNorm<Eigen::Infinity>();
      REQUIRE(resid <= 1e-10 * (1.0 + sys.rhs.lpNorm<Eigen::Infinity>()));
    }
  }
}

TEST_CASE("the oracle is a discrete fixed point of the lattice operator") {
  const auto spec = example_spec();
  const auto quad = trapezoid_weights(Grid(0.0, 1.0, 201));
  const auto oracle = nystrom_solve(spec, quad);
  const auto image = apply_T(spec, oracle, quad);
  REQUIRE(sup_diff(image, oracle) <= 1e-10 * (1.0 + sup_norm(oracle)));
}

TEST_CASE("oracle and bracketing solver agree when the bracket collapses") {
  std::mt19937_64 rng(2718);
  const auto quad = trapezoid_weights(Grid(0.0, 1.0, 101));
  SolverConfig cfg;
  for (int it = 0; it < 8; ++it) {
    const auto dir = it % 2 == 0 ? Monotone::Preserving : Monotone::Reversing;
    const auto spec = random_class_spec(rng, dir);
    CAPTURE(unparse(spec.f_expr), unparse(spec.K_expr), spec.lambda);
    const auto oracle = nystrom_solve(spec, quad);
    const auto result = solve(spec, quad, cfg);
    REQUIRE(result.converged);
    REQUIRE(sup_diff(oracle, result.phi_min) <= 10.0 * cfg.tol);
    REQUIRE(sup_diff(oracle, result.phi_max) <= 10.0 * cfg.tol);
  }
}

TEST_CASE("Gauss-Legendre rule") {
  SECTION("weights are positive and sum to b-a") {
    const auto rule = gauss_legendre(0.0, 2.0, 7);
    double sum = 0.0;
    for (double w : rule.weights) {
      REQUIRE(w > 0.0);
      sum += w;
    }
    REQUIRE(sum == Catch::Approx(2.0).margin(1e-13));
  }
  SECTION("exact on polynomials up to degree 2m-1") {
    const auto rule = gauss_legendre(0.0, 2.0, 5);
    double quad_x2 = 0.0, quad_x9 = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      quad_x2 += rule.weights[j] * rule.nodes[j] * rule.nodes[j];
      quad_x9 += rule.weights[j] * std::pow(rule.nodes[j], 9);
    }
    REQUIRE(quad_x2 == Catch::Approx(8.0 / 3.0).margin(1e-12));
    REQUIRE(quad_x9 == Catch::Approx(std::pow(2.0, 10) / 10.0).margin(1e-11));
  }
}

TEST_CASE("Gauss-Legendre oracle nails smooth closed forms") {
  const Grid eval(0.0, 1.0, 101);
  const auto v = nystrom_solve_gauss(separable_spec(), 20, eval);
  double err = 0.0;
  for (int i = 0; i < eval.n; ++i)
    err = std::fmax(err, std::fabs(v[i] - 1.2 * eval.node(i)));
  REQUIRE(err <= 1e-12);
}
