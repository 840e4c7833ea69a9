#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>
#include <string>

#include "fredlat/expr.hpp"

using namespace fredlat;

namespace {

const std::set<std::string> vars_t = {"t"};
const std::set<std::string> vars_ts = {"t", "s"};

const char* example_f = "piecewise(t < 1/2 -> t^4/6, else -> t^3/5)";
const char* example_kernel = "4*t^7*sin(pi/2*s)^9";

}  // namespace

TEST_CASE("parse builds the expected tree shapes") {
  SECTION("t^3/5 is Div(Pow(t,3),5)") {
    ExprPtr e = parse("t^3/5", vars_t);
    ExprPtr expected = make_binary(
        BinaryOp::Div, make_binary(BinaryOp::Pow, make_variable("t"), make_number(3)),
        make_number(5));
    REQUIRE(structurally_equal(e, expected));
  }
  SECTION("power is right-associative and binds tighter than unary minus") {
    REQUIRE(evaluate(parse("2^3^2", {}), 0.0) == 512.0);
    REQUIRE(evaluate(parse("(2^3)^2", {}), 0.0) == 64.0);
    REQUIRE(evaluate(parse("-2^2", {}), 0.0) == -4.0);
    REQUIRE(evaluate(parse("2^-1", {}), 0.0) == 0.5);
  }
  SECTION("sum/product precedence") {
    REQUIRE(evaluate(parse("2*3+4", {}), 0.0) == 10.0);
    REQUIRE(evaluate(parse("2+3*4", {}), 0.0) == 14.0);
    REQUIRE(evaluate(parse("2-3-4", {}), 0.0) == -5.0);
    REQUIRE(evaluate(parse("12/3/2", {}), 0.0) == 2.0);
  }
  SECTION("the kernel of the worked example parses with {t,s}") {
    ExprPtr k = parse(example_kernel, vars_ts);
    REQUIRE(evaluate(k, 1.0, 1.0) == 4.0);  // sin(pi/2) = 1 forces 4*1*1
  }
}

TEST_CASE("parse rejects malformed input with positions") {
  SECTION("unbalanced parenthesis") {
    try {
      parse("sin(", vars_t);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.position() == 4);
    }
  }
  SECTION("no implicit multiplication") {
    REQUIRE_THROWS_AS(parse("4t", vars_t), ParseError);
  }
  SECTION("variable outside the allowed set") {
    REQUIRE_THROWS_AS(parse("t+s", vars_t), ParseError);
    REQUIRE_THROWS_WITH(parse("s", vars_t),
                        Catch::Matchers::ContainsSubstring("'s'"));
  }
  SECTION("empty piecewise") {
    REQUIRE_THROWS_WITH(parse("piecewise()", vars_t),
                        Catch::Matchers::ContainsSubstring("empty piecewise"));
    REQUIRE_THROWS_WITH(parse("piecewise(else -> 1)", vars_t),
                        Catch::Matchers::ContainsSubstring("empty piecewise"));
  }
  SECTION("piecewise without a final else arm") {
    REQUIRE_THROWS_WITH(parse("piecewise(t < 1 -> 2)", vars_t),
                        Catch::Matchers::ContainsSubstring("else"));
  }
  SECTION("wrong builtin arity") {
    REQUIRE_THROWS_AS(parse("sin(1,2)", vars_t), ParseError);
    REQUIRE_THROWS_AS(parse("min(1)", vars_t), ParseError);
  }
}

TEST_CASE("evaluate") {
  SECTION("plain arithmetic") {
    REQUIRE(evaluate(parse("t+1", vars_t), 2.0) == 3.0);
  }
  SECTION("the example's piecewise f at the boundary takes the second arm") {
    ExprPtr f = parse(example_f, vars_t);
    REQUIRE(evaluate(f, 0.5) == 0.025);  // 0.5^3/5, guard t < 1/2 fails at 0.5
    REQUIRE(evaluate(f, 0.25) == std::pow(0.25, 4) / 6.0);
    REQUIRE(evaluate(f, 1.0) == 0.2);
  }
  SECTION("piecewise selects the first arm whose guard holds") {
    ExprPtr e = parse("piecewise(t <= 1 -> 10, t <= 2 -> 20, else -> 30)", vars_t);
    REQUIRE(evaluate(e, 1.0) == 10.0);
    REQUIRE(evaluate(e, 1.5) == 20.0);
    REQUIRE(evaluate(e, 2.5) == 30.0);
  }
  SECTION("builtins") {
    REQUIRE(evaluate(parse("min(3, max(1, 2))", {}), 0.0) == 2.0);
    REQUIRE(evaluate(parse("abs(-2)", {}), 0.0) == 2.0);
    REQUIRE(evaluate(parse("sqrt(9)", {}), 0.0) == 3.0);
    REQUIRE(evaluate(parse("log(exp(1))", {}), 0.0) == Catch::Approx(1.0));
    REQUIRE(evaluate(parse("cos(0)", {}), 0.0) == 1.0);
  }
  SECTION("domain errors name the offending sub-expression") {
    REQUIRE_THROWS_WITH(evaluate(parse("1/(t-2)", vars_t), 2.0),
                        Catch::Matchers::ContainsSubstring("division by zero"));
    REQUIRE_THROWS_WITH(evaluate(parse("log(t)", vars_t), 0.0),
                        Catch::Matchers::ContainsSubstring("log"));
    REQUIRE_THROWS_WITH(evaluate(parse("sqrt(t)", vars_t), -1.0),
                        Catch::Matchers::ContainsSubstring("sqrt"));
    REQUIRE_THROWS_AS(evaluate(parse("exp(1e4)", vars_t), 0.0), EvalError);
  }
  SECTION("unbound s") {
    ExprPtr k = parse("t*s", vars_ts);
    REQUIRE_THROWS_AS(evaluate(k, 1.0), EvalError);
    REQUIRE(evaluate(k, 2.0, 3.0) == 6.0);
  }
  SECTION("evaluation is deterministic") {
    ExprPtr k = parse(example_kernel, vars_ts);
    const double v1 = evaluate(k, 0.7, 0.3);
    const double v2 = evaluate(k, 0.7, 0.3);
    REQUIRE(v1 == v2);
  }
}

TEST_CASE("guard nudging gives one-sided limits at piecewise boundaries") {
  ExprPtr step = parse("piecewise(t < 1/2 -> 0, else -> 1)", vars_t);
  REQUIRE(evaluate(step, 0.5) == 1.0);
  REQUIRE(evaluate(step, 0.5, std::nullopt, LimitSide::Left) == 0.0);
  REQUIRE(evaluate(step, 0.5, std::nullopt, LimitSide::Right) == 1.0);

  // Closed-at-left guard written the other way around.
  ExprPtr step2 = parse("piecewise(t <= 1/2 -> 0, else -> 1)", vars_t);
  REQUIRE(evaluate(step2, 0.5) == 0.0);
  REQUIRE(evaluate(step2, 0.5, std::nullopt, LimitSide::Left) == 0.0);
  REQUIRE(evaluate(step2, 0.5, std::nullopt, LimitSide::Right) == 1.0);

  // The arm value itself is evaluated at the exact t, only the guard is nudged.
  ExprPtr ramp = parse("piecewise(t < 1/2 -> t, else -> t+1)", vars_t);
  REQUIRE(evaluate(ramp, 0.5, std::nullopt, LimitSide::Left) == 0.5);
  REQUIRE(evaluate(ramp, 0.5, std::nullopt, LimitSide::Right) == 1.5);
}

namespace {

ExprPtr random_expr(std::mt19937_64& rng, int depth, bool allow_s) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  switch (pick(rng)) {
    case 0: {
      std::uniform_int_distribution<int> lit(0, 4);
      const double choices[] = {0.0, 1.0, 2.5, 0.2, 7.0};
      return make_number(choices[lit(rng)]);
    }
    case 1:
      return allow_s && (rng() & 1) ? make_variable("s") : make_variable("t");
    case 2:
      return make_pi();
    case 3:
      return make_negate(random_expr(rng, depth - 1, allow_s));
    case 4:
    case 5:
    case 6: {
      std::uniform_int_distribution<int> op(0, 4);
      return make_binary(static_cast<BinaryOp>(op(rng)),
                         random_expr(rng, depth - 1, allow_s),
                         random_expr(rng, depth - 1, allow_s));
    }
    case 7:
    case 8: {
      std::uniform_int_distribution<int> fn(0, 7);
      const auto f = static_cast<Builtin>(fn(rng));
      std::vector<ExprPtr> args;
      args.push_back(random_expr(rng, depth - 1, allow_s));
      if (f == Builtin::Min || f == Builtin::Max)
        args.push_back(random_expr(rng, depth - 1, allow_s));
      return make_call(f, std::move(args));
    }
    default: {
      std::uniform_int_distribution<int> narms(1, 3);
      std::uniform_int_distribution<int> cmp(0, 3);
      std::vector<PiecewiseArm> arms;
      const int n = narms(rng);
      for (int i = 0; i < n; ++i) {
        arms.push_back(PiecewiseArm{random_expr(rng, depth - 1, allow_s),
                                    static_cast<CompareOp>(cmp(rng)),
                                    random_expr(rng, depth - 1, allow_s),
                                    random_expr(rng, depth - 1, allow_s)});
      }
      return make_piecewise(std::move(arms), random_expr(rng, depth - 1, allow_s));
    }
  }
}

}  // namespace

TEST_CASE("parse(unparse(ast)) reproduces the AST structurally") {
  std::mt19937_64 rng(20240811);
  for (int i = 0; i < 500; ++i) {
    ExprPtr e = random_expr(rng, 4, true);
    const std::string text = unparse(e);
    CAPTURE(text);
    ExprPtr back = parse(text, vars_ts);
    REQUIRE(structurally_equal(e, back));
  }
}

TEST_CASE("unparse places parentheses only where the grammar needs them") {
  auto t = make_variable("t");
  auto one = make_number(1);
  auto two = make_number(2);
  REQUIRE(unparse(make_binary(BinaryOp::Sub, one,
                              make_binary(BinaryOp::Sub, two, t))) == "1-(2-t)");
  REQUIRE(unparse(make_binary(BinaryOp::Sub,
                              make_binary(BinaryOp::Sub, one, two), t)) == "1-2-t");
  REQUIRE(unparse(make_binary(
              BinaryOp::Pow, make_binary(BinaryOp::Pow, t, one), two)) == "(t^1)^2");
  REQUIRE(unparse(make_binary(
              BinaryOp::Pow, t, make_binary(BinaryOp::Pow, one, two))) == "t^1^2");
  REQUIRE(unparse(make_negate(make_binary(BinaryOp::Add, t, one))) == "-(t+1)");
  REQUIRE(unparse(make_binary(BinaryOp::Mul, make_negate(t), two)) == "-t*2");
  REQUIRE(unparse(parse(example_f, vars_t)) ==
          "piecewise(t < 1/2 -> t^4/6, else -> t^3/5)");
}
