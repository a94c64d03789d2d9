#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hh/expr.hpp"

using namespace hh;
using namespace hh::expr;

TEST_CASE("two-token expression parses to the expected tree") {
  Ast ast = parse("1 + x");
  REQUIRE(ast.root());
  CHECK(ast.root()->op == Op::Add);
  CHECK(ast.root()->a->op == Op::Const);
  CHECK(ast.root()->b->op == Op::Var);
  CHECK(ast.node_count() == 3);
}

TEST_CASE("linear evaluation") { CHECK(parse("2*x").eval(0.5) == doctest::Approx(1.0)); }

TEST_CASE("exp(x)^2 at x=1 equals direct arithmetic") {
  double direct = std::exp(1.0) * std::exp(1.0);
  CHECK(parse("exp(x)^2").eval(1.0) == doctest::Approx(direct).epsilon(1e-15));
}

TEST_CASE("eval basics") {
  CHECK(parse("3").eval(0.7) == 3.0);
  CHECK(parse("1+x").eval(0.25) == 1.25);
  CHECK_THROWS_AS(parse("sin(x)/x").eval(0.0), DomainError);
  CHECK_THROWS_AS(parse("log(x - 1)").eval(0.5), DomainError);
}

TEST_CASE("precedence and associativity") {
  CHECK(parse("2+3*4").eval(0) == 14.0);
  CHECK(parse("2^3^2").eval(0) == 512.0);  // right-associative power
  CHECK(parse("8/4/2").eval(0) == 1.0);    // left-associative division
  CHECK(parse("2-3-4").eval(0) == -5.0);
  CHECK(parse("-2^2").eval(0) == -4.0);  // ^ binds tighter than unary minus
  CHECK(parse("2^-1").eval(0) == 0.5);
  CHECK(parse("min(1, x) + max(0.5, x)").eval(0.75) == doctest::Approx(1.5));
  CHECK(parse("tanh(0) + cos(0) + abs(-2)").eval(0) == doctest::Approx(3.0));
}

TEST_CASE("syntax errors carry byte offsets") {
  CHECK_THROWS_AS(parse(""), SyntaxError);
  CHECK_THROWS_AS(parse("1 +"), SyntaxError);
  CHECK_THROWS_AS(parse("(1 + x"), SyntaxError);
  CHECK_THROWS_AS(parse("1 + x)"), SyntaxError);
  try {
    parse("1 + $");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 4);
  }
}

TEST_CASE("unknown identifiers and arity") {
  CHECK_THROWS_AS(parse("y + 1"), UnknownIdentifier);
  CHECK_THROWS_AS(parse("foo(x)"), UnknownIdentifier);
  CHECK_THROWS_AS(parse("min(x)"), ArityError);
  CHECK_THROWS_AS(parse("exp(x, 1)"), ArityError);
}

TEST_CASE("depth and node limits are enforced") {
  std::string deep = "x";
  for (int i = 0; i < 100; ++i) deep = "(" + deep + ")";
  CHECK_THROWS_AS(parse(deep), SyntaxError);

  std::string wide = "x";
  for (int i = 0; i < 3000; ++i) wide += "+x+1";
  CHECK_THROWS_AS(parse(wide), SyntaxError);
}

TEST_CASE("profile validation against (H1)") {
  EnvProfile p = load_profile("1+x", 256);
  CHECK(p.min_sample >= 1.0);
  CHECK(p.min_sample < 1.001);
  CHECK(p.max_sample <= 2.0);
  CHECK(p.max_sample > 1.999);
  CHECK(p.variation > 0.99);

  CHECK_THROWS_AS(load_profile("2"), H1Violation);
  try {
    load_profile("2");
  } catch (const H1Violation& e) {
    CHECK(e.kind() == H1Violation::Kind::Constant);
  }
  try {
    load_profile("x - 0.5");
  } catch (const H1Violation& e) {
    CHECK(e.kind() == H1Violation::Kind::NegativeValue);
  }

  ProfileOptions allow;
  allow.allow_constant = true;
  CHECK_NOTHROW(load_profile("2", 256, allow));
  CHECK(load_profile("2", 256, allow).variation == 0.0);
}

TEST_CASE("validate_profile requires enough samples") {
  Ast ast = parse("1+x");
  CHECK_THROWS_AS(validate_profile(ast, 32), std::invalid_argument);
}

TEST_CASE("pretty-print round trip evaluates identically") {
  std::vector<std::string> corpus = {
      "1+x",
      "2*x",
      "1.6*x",
      "0.6 + 6*(x-0.5)^2",
      "exp(x)^2 - sin(3*x)/(1+x)",
      "min(1+x, 2-x) * max(0.1, tanh(x))",
      "-x^2 + 2^-x",
      "abs(x - 0.5) + cos(x)^3",
  };
  std::mt19937 rng(20240817u);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const auto& src : corpus) {
    Ast a = parse(src);
    Ast b = parse(a.pretty());
    for (int i = 0; i < 100; ++i) {
      double x = unif(rng);
      CHECK(std::fabs(a.eval(x) - b.eval(x)) < 1e-14);
    }
  }
}

TEST_CASE("profile validity is monotone in sample count") {
  for (const char* src : {"1+x", "2*x", "1.6*x", "0.6 + 6*(x-0.5)^2"}) {
    CHECK_NOTHROW(load_profile(src, 256));
    CHECK_NOTHROW(load_profile(src, 512));
    CHECK_NOTHROW(load_profile(src, 1024));
  }
}
