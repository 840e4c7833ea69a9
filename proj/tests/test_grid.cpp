#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>
#include <vector>

#include "fredlat/grid.hpp"

using namespace fredlat;

namespace {

const FunctionClass op_usc_2{Monotone::Preserving, Semicontinuity::Upper,
                             Sign::NonNegative, 2.0};

GridFunction sample_text(const char* text, const Grid& g,
                         LimitSide side = LimitSide::None) {
  return sample(parse(text, {"t"}), g, side);
}

/// Random nondecreasing function with values in [0, bound].
GridFunction random_op_member(const Grid& g, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(g.n));
  double acc = 0.0;
  for (auto& x : v) {
    acc += u(rng);
    x = acc;
  }
  const double scale = bound * u(rng) / acc;
  for (auto& x : v) x *= scale;
  return GridFunction(g, std::move(v));
}

}  // namespace

TEST_CASE("grid construction") {
  const Grid g(0.0, 1.0, 3);
  REQUIRE(g.node(0) == 0.0);
  REQUIRE(g.node(1) == 0.5);
  REQUIRE(g.node(2) == 1.0);
  REQUIRE(g.spacing() == 0.5);
  REQUIRE_THROWS_AS(Grid(1.0, 0.0, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(Grid(0.0, 1.0, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(GridFunction(g, {0.0, std::nan(""), 1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(GridFunction(g, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("pointwise order") {
  const Grid g(0.0, 1.0, 3);
  const auto zero = GridFunction::constant(g, 0.0);
  const auto two = GridFunction::constant(g, 2.0);
  REQUIRE(leq(zero, two));
  REQUIRE(leq(zero, zero));

  const auto up = sample_text("t", g);
  const auto down = sample_text("1-t", g);
  REQUIRE_FALSE(leq(up, down));
  REQUIRE_FALSE(leq(down, up));

  const Grid other(0.0, 1.0, 5);
  REQUIRE_THROWS_AS(leq(zero, GridFunction::constant(other, 0.0)), std::invalid_argument);
}

TEST_CASE("leq is a partial order on random functions") {
  const Grid g(0.0, 1.0, 17);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  auto random_fn = [&] {
    std::vector<double> v(17);
    for (auto& x : v) x = u(rng);
    return GridFunction(g, std::move(v));
  };
  for (int it = 0; it < 50; ++it) {
    const auto f = random_fn();
    const auto h = random_fn();
    const auto k = random_fn();
    REQUIRE(leq(f, f));
    if (leq(f, h) && leq(h, f)) REQUIRE(f.values() == h.values());
    if (leq(f, h) && leq(h, k)) REQUIRE(leq(f, k));
  }
}

TEST_CASE("in_class") {
  const Grid g(0.0, 1.0, 11);
  const auto id = sample_text("t", g);
  REQUIRE(in_class(id, op_usc_2));
  REQUIRE_FALSE(in_class(id, FunctionClass{Monotone::Preserving, Semicontinuity::Upper,
                                           Sign::NonNegative, 0.5}));
  REQUIRE_FALSE(in_class(id, FunctionClass{Monotone::Reversing, Semicontinuity::Upper,
                                           Sign::NonNegative, 2.0}));

  SECTION("the worked example's f is order-preserving with bound 1/5") {
    const Grid fine(0.0, 1.0, 1001);
    const auto f = sample(parse("piecewise(t < 1/2 -> t^4/6, else -> t^3/5)", {"t"}),
                          fine, LimitSide::Right);
    REQUIRE(in_class(f, FunctionClass{Monotone::Preserving, Semicontinuity::Upper,
                                      Sign::NonNegative, 0.2}));
  }
  SECTION("non-positive classes") {
    const FunctionClass neg{Monotone::Reversing, Semicontinuity::Lower,
                            Sign::NonPositive, -2.0};
    const auto mt = sample_text("-t", g);
    REQUIRE(in_class(mt, neg));
    REQUIRE_FALSE(in_class(id, neg));
  }
}

TEST_CASE("pointwise_inf and pointwise_sup") {
  const Grid g(0.0, 1.0, 5);
  SECTION("empty set gives the class top / bottom constants") {
    const auto top = pointwise_inf(g, {}, op_usc_2);
    const auto bottom = pointwise_sup(g, {}, op_usc_2);
    for (int i = 0; i < g.n; ++i) {
      REQUIRE(top[i] == 2.0);
      REQUIRE(bottom[i] == 0.0);
    }
  }
  SECTION("singleton") {
    const std::vector<GridFunction> one = {sample_text("t", g)};
    const auto r = pointwise_inf(g, one, op_usc_2);
    REQUIRE(r.values() == one[0].values());
  }
  SECTION("members outside the class are rejected") {
    const std::vector<GridFunction> pair = {sample_text("t", g), sample_text("1-t", g)};
    REQUIRE_THROWS_WITH(pointwise_inf(g, pair, op_usc_2),
                        Catch::Matchers::ContainsSubstring("outside the declared class"));
  }
  SECTION("nodewise min of two class members, and closure") {
    const std::vector<GridFunction> pair = {sample_text("t", g), sample_text("t^2", g)};
    const auto lo = pointwise_inf(g, pair, op_usc_2);
    const auto hi = pointwise_sup(g, pair, op_usc_2);
    for (int i = 0; i < g.n; ++i) {
      REQUIRE(lo[i] == std::min(pair[0][i], pair[1][i]));
      REQUIRE(hi[i] == std::max(pair[0][i], pair[1][i]));
    }
    REQUIRE(in_class(lo, op_usc_2));
    REQUIRE(in_class(hi, op_usc_2));
  }
}

TEST_CASE("lattice laws hold on random class members") {
  const Grid g(0.0, 1.0, 9);
  std::mt19937_64 rng(77);
  for (int it = 0; it < 40; ++it) {
    const std::vector<GridFunction> fs = {random_op_member(g, 2.0, rng),
                                          random_op_member(g, 2.0, rng),
                                          random_op_member(g, 2.0, rng)};
    // Closure (the finite analog of completeness: any finite subset,
    // including the empty one, has sup/inf inside the class).
    const auto i12 = pointwise_inf(g, std::span(fs).subspan(0, 2), op_usc_2);
    const auto s12 = pointwise_sup(g, std::span(fs).subspan(0, 2), op_usc_2);
    REQUIRE(in_class(i12, op_usc_2));
    REQUIRE(in_class(s12, op_usc_2));
    // Idempotence, commutativity, associativity, absorption -- nodewise.
    const std::vector<GridFunction> f00 = {fs[0], fs[0]};
    REQUIRE(pointwise_inf(g, f00, op_usc_2).values() == fs[0].values());
    const std::vector<GridFunction> f01 = {fs[0], fs[1]};
    const std::vector<GridFunction> f10 = {fs[1], fs[0]};
    REQUIRE(pointwise_inf(g, f01, op_usc_2).values() ==
            pointwise_inf(g, f10, op_usc_2).values());
    const std::vector<GridFunction> all = {fs[0], fs[1], fs[2]};
    const std::vector<GridFunction> right = {fs[0], pointwise_inf(g, std::span(fs).subspan(1, 2), op_usc_2)};
    REQUIRE(pointwise_inf(g, all, op_usc_2).values() ==
            pointwise_inf(g, right, op_usc_2).values());
    const std::vector<GridFunction> absorb = {fs[0], s12};
    REQUIRE(pointwise_inf(g, absorb, op_usc_2).values() == fs[0].values());
    // inf <= members <= sup.
    REQUIRE(leq(i12, fs[0]));
    REQUIRE(leq(fs[0], s12));
  }
}

TEST_CASE("sample") {
  SECTION("zero expression") {
    const Grid g(0.0, 1.0, 7);
    const auto z = sample_text("0", g);
    for (int i = 0; i < g.n; ++i) REQUIRE(z[i] == 0.0);
  }
  SECTION("the worked example's f on a 3-node grid") {
    const Grid g(0.0, 1.0, 3);
    const auto f = sample(parse("piecewise(t < 1/2 -> t^4/6, else -> t^3/5)", {"t"}), g);
    REQUIRE(f[0] == 0.0);
    REQUIRE(f[1] == 0.025);
    REQUIRE(f[2] == 0.2);
  }
  SECTION("t^2 on the endpoints") {
    const Grid g(0.0, 1.0, 2);
    const auto f = sample_text("t^2", g);
    REQUIRE(f[0] == 0.0);
    REQUIRE(f[1] == 1.0);
  }
  SECTION("side only affects interior boundary nodes") {
    const Grid g(0.0, 1.0, 3);
    const auto step = parse("piecewise(t < 1/2 -> 0, else -> 1)", {"t"});
    const auto left = sample(step, g, LimitSide::Left);
    const auto right = sample(step, g, LimitSide::Right);
    REQUIRE(left[1] == 0.0);
    REQUIRE(right[1] == 1.0);
    REQUIRE(left[0] == right[0]);
    REQUIRE(left[2] == right[2]);
  }
  SECTION("evaluation failures carry the node index") {
    const Grid g(0.0, 1.0, 3);
    REQUIRE_THROWS_WITH(sample_text("1/(t-1/2)", g),
                        Catch::Matchers::ContainsSubstring("node 1"));
  }
}

TEST_CASE("sample_side_for matches one-sided continuity of monotone classes") {
  auto cls = [](Monotone m, Semicontinuity s) {
    return FunctionClass{m, s, Sign::NonNegative, 1.0};
  };
  REQUIRE(sample_side_for(cls(Monotone::Preserving, Semicontinuity::Upper)) == LimitSide::Right);
  REQUIRE(sample_side_for(cls(Monotone::Reversing, Semicontinuity::Lower)) == LimitSide::Right);
  REQUIRE(sample_side_for(cls(Monotone::Preserving, Semicontinuity::Lower)) == LimitSide::Left);
  REQUIRE(sample_side_for(cls(Monotone::Reversing, Semicontinuity::Upper)) == LimitSide::Left);
}

TEST_CASE("CSV round-trips bit-exactly") {
  const Grid g(0.0, 1.0, 101);
  std::mt19937_64 rng(5);
  const auto f = random_op_member(g, 2.0, rng);
  std::stringstream buf;
  write_csv(f, buf);
  const auto back = read_csv(buf);
  REQUIRE(back.grid() == f.grid());
  REQUIRE(back.values() == f.values());

  std::stringstream bad("x,y\n0,0\n");
  REQUIRE_THROWS_AS(read_csv(bad), std::invalid_argument);
}
