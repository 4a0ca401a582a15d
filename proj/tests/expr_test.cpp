#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mtk/expr.hpp"

#include "support/oracles.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace mtk;

namespace {

const std::vector<std::string> kXY = {"x", "y"};

Expr parse_xy(const std::string& src) { return parse_expression(src, kXY); }

Vec pt(double x, double y) {
  Vec p(2);
  p << x, y;
  return p;
}

}  // namespace

TEST_CASE("literals and arithmetic evaluate exactly") {
  CHECK(parse_xy("2 + 3*4").eval(pt(0, 0)) == 14.0);
  CHECK(parse_xy("2*x + y").eval(pt(3, 4)) == 10.0);
  CHECK(parse_xy("(2 + 3)*4").eval(pt(0, 0)) == 20.0);
  CHECK(parse_xy("-x^2").eval(pt(3, 0)) == -9.0);     // ^ binds before unary -
  CHECK(parse_xy("(0 - x)^2").eval(pt(3, 0)) == 9.0);
  CHECK(parse_xy("2^3").eval(pt(0, 0)) == 8.0);
  CHECK(parse_xy("x^(-2)").eval(pt(2, 0)) == 0.25);
  CHECK(parse_xy("1e2 + 1.5e-1").eval(pt(0, 0)) == doctest::Approx(100.15));
  CHECK(parse_xy("10 - 4 - 3").eval(pt(0, 0)) == 3.0);  // left associative
  CHECK(parse_xy("24/4/2").eval(pt(0, 0)) == 3.0);
}

TEST_CASE("rational value and gradient at a reference point") {
  const Expr e = parse_xy("x^2/(x^2 + y^2)");
  CHECK(e.eval(pt(1, 1)) == doctest::Approx(0.5).epsilon(1e-15));
  const DualVector d = e.eval_dual(pt(1, 1));
  CHECK(d.value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d.grad(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.grad(1) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("function derivatives are exact, not finite differences") {
  const Expr e = parse_xy("sin(x^2)");
  const double x = 0.7;
  const DualVector d = e.eval_dual(pt(x, 0));
  CHECK(d.grad(0) ==
        doctest::Approx(2 * x * std::cos(x * x)).epsilon(1e-15));

  const Expr lns = parse_xy("ln(sqrt(x))");
  const DualVector d2 = lns.eval_dual(pt(4, 0));
  CHECK(d2.value == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(d2.grad(0) == doctest::Approx(1.0 / 8.0).epsilon(1e-15));

  const Expr ex = parse_xy("exp(x*y)");
  const DualVector d3 = ex.eval_dual(pt(0.5, -1.5));
  CHECK(d3.grad(0) ==
        doctest::Approx(-1.5 * std::exp(-0.75)).epsilon(1e-14));
  CHECK(d3.grad(1) ==
        doctest::Approx(0.5 * std::exp(-0.75)).epsilon(1e-14));
}

TEST_CASE("gradients agree with the finite-difference oracle") {
  const char* sources[] = {
      "x^2*y - 3*x + 2",        "x/(1 + y^2)",       "sqrt(x^2 + y^2 + 1)",
      "sin(x)*cos(y)",          "exp(x - y)",        "ln(2 + x^2)",
      "(x + y)^3/(2 + x^2)",    "x^2 + y^2 - x*y",
  };
  const Vec p = pt(0.8, -0.6);
  for (const char* src : sources) {
    const Expr e = parse_xy(src);
    const DualVector d = e.eval_dual(p);
    const Vec fd = oracle::fd_gradient(e, p);
    for (int i = 0; i < 2; ++i) {
      const double scale = std::max(1.0, std::abs(d.grad(i)));
      CHECK(std::abs(d.grad(i) - fd(i)) / scale <= 1e-7);
    }
  }
}

TEST_CASE("parse errors carry the byte offset of the problem") {
  CHECK_THROWS_AS(parse_xy("x*(y"), ParseError);
  try {
    parse_xy("x*(y");
  } catch (const ParseError& e) {
    CHECK(e.offset == 4);
    CHECK(std::string(e.what()).find("expected ')'") != std::string::npos);
  }
  try {
    parse_xy("");
  } catch (const ParseError& e) {
    CHECK(e.offset == 0);
  }
  CHECK_THROWS_AS(parse_xy("x + zz"), ParseError);
  try {
    parse_xy("x + zz");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("zz") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_xy("1."), ParseError);
  CHECK_THROWS_AS(parse_xy("x^y"), ParseError);      // exponent must be numeric
  CHECK_THROWS_AS(parse_xy("sqrt x"), ParseError);   // functions need parens
  CHECK_THROWS_AS(parse_xy("x $ y"), ParseError);
  CHECK_THROWS_AS(parse_xy("x + "), ParseError);
  CHECK_THROWS_AS(parse_xy("(x)(y)"), ParseError);   // trailing input
}

TEST_CASE("evaluation singularities raise domain errors naming the culprit") {
  CHECK_THROWS_AS(parse_xy("1/x").eval(pt(0, 1)), DomainError);
  CHECK_THROWS_AS(parse_xy("sqrt(0 - x)").eval(pt(1, 0)), DomainError);
  CHECK_THROWS_AS(parse_xy("ln(x)").eval(pt(0, 0)), DomainError);
  CHECK_THROWS_AS(parse_xy("ln(0 - x)").eval(pt(1, 0)), DomainError);
  // derivative singularity: sqrt'(0) is infinite even though sqrt(0) is fine
  CHECK(parse_xy("sqrt(x)").eval(pt(0, 0)) == 0.0);
  CHECK_THROWS_AS(parse_xy("sqrt(x)").eval_dual(pt(0, 0)), DomainError);
  try {
    parse_xy("y + 1/x").eval(pt(0, 2));
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("1/x") != std::string::npos);
  }
  // overflow is a domain error, not a silent inf
  CHECK_THROWS_AS(parse_xy("exp(exp(x))").eval(pt(10, 0)), DomainError);
}

TEST_CASE("wrong-dimension points are rejected") {
  Vec p1(1);
  p1 << 1.0;
  CHECK_THROWS_AS(parse_xy("x + y").eval(p1), PreconditionError);
}

TEST_CASE("printer uses minimal parentheses") {
  CHECK(parse_xy("x + y*x").str() == "x + y*x");
  CHECK(parse_xy("(x + y)*x").str() == "(x + y)*x");
  CHECK(parse_xy("x - (y - 2)").str() == "x - (y - 2)");
  CHECK(parse_xy("x - y - 2").str() == "x - y - 2");
  CHECK(parse_xy("-(x + y)").str() == "-(x + y)");
  CHECK(parse_xy("-x + y").str() == "-x + y");
  CHECK(parse_xy("x^2").str() == "x^2");
  CHECK(parse_xy("x^(-2)").str() == "x^(-2)");
  CHECK(parse_xy("(x*y)^2").str() == "(x*y)^2");
  CHECK(parse_xy("2*x^2").str() == "2*x^2");
  CHECK(parse_xy("x/(y*x)").str() == "x/(y*x)");
  CHECK(parse_xy("x/y*2").str() == "x/y*2");
  CHECK(parse_xy("sqrt(x + 1)").str() == "sqrt(x + 1)");
}

TEST_CASE("str round-trips to a structurally equal expression") {
  const char* sources[] = {
      "x^2/(x^2 + y^2)",
      "-(x + y)*sqrt(x^2 + 1)",
      "1.5*x - 2/(y + 3) + x*y^2",
      "sin(cos(x) + exp(y))",
      "x^(-3) + ln(1 + x^2)/2",
      "-2",
      "0.25",
      "x - (y - x)",
  };
  for (const char* src : sources) {
    const Expr e = parse_xy(src);
    const Expr back = parse_xy(e.str());
    CHECK(back.same_as(e));
    CHECK(back.str() == e.str());  // printing is a fixed point
  }
}

TEST_CASE("combinators normalize literals and double negation") {
  CHECK(Expr::literal(-3.0).str() == "-3");
  CHECK(Expr::neg(Expr::neg(Expr::coordinate(0, "x"))).str() == "x");
  CHECK(Expr::literal(0.0).str() == "0");
  CHECK_THROWS_AS(Expr::literal(std::numeric_limits<double>::infinity()),
                  PreconditionError);
  CHECK_THROWS_AS(Expr::pow(Expr::coordinate(0, "x"),
                            std::numeric_limits<double>::quiet_NaN()),
                  PreconditionError);
  const Expr built =
      Expr::coordinate(0, "x") * Expr::coordinate(1, "y") + Expr::literal(1.0);
  CHECK(built.str() == "x*y + 1");
  CHECK(built.eval(pt(2, 3)) == 7.0);
}

TEST_CASE("structural equality distinguishes shape and payload") {
  CHECK(parse_xy("x + y").same_as(parse_xy("x + y")));
  CHECK_FALSE(parse_xy("x + y").same_as(parse_xy("y + x")));
  CHECK_FALSE(parse_xy("x^2").same_as(parse_xy("x^3")));
  CHECK_FALSE(parse_xy("sin(x)").same_as(parse_xy("cos(x)")));
}

TEST_CASE("function-name identifiers are reserved") {
  CHECK(is_function_name("sqrt"));
  CHECK(is_function_name("ln"));
  CHECK_FALSE(is_function_name("x"));
  CHECK_FALSE(is_function_name("sqrtx"));
}
