#include <doctest.h>

#include <random>

#include "jetcalc/context.hpp"
#include "jetcalc/diff_poly.hpp"
#include "jetcalc/errors.hpp"
#include "jetcalc/expr.hpp"
#include "jetcalc/rational.hpp"
#include "support.hpp"

using namespace jetcalc;
using jetcalc::testing::P;

TEST_CASE("rational arithmetic is exact and canonical") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(-3, -6) == Rational(1, 2));
  CHECK(Rational(3, -6).str() == "-1/2");
  CHECK(Rational::parse("12345678901234567890").str() == "12345678901234567890");
  CHECK(binomial(5, 2) == Rational(10));
  CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("multi-indices are order-insensitive") {
  CHECK(MultiIndex::fromDirections({0, 1, 0}) == MultiIndex::fromDirections({1, 0, 0}));
  CHECK(MultiIndex::fromDirections({0, 0}).order() == 2);
  CHECK(MultiIndex::unit(0) < MultiIndex::unit(1));
  CHECK(MultiIndex::fromDirections({0, 0}) < MultiIndex::fromDirections({0, 1}));
  CHECK(MultiIndex::fromDirections({0, 1}) < MultiIndex::fromDirections({1, 1}));
  CHECK(MultiIndex::ofOrder(2, 2).size() == 3);
}

TEST_CASE("context validation") {
  CHECK_THROWS_AS(JetContext({"x", "x"}, {"u"}), InvalidContext);
  CHECK_THROWS_AS(JetContext({"x"}, {}), InvalidContext);
  CHECK_THROWS_AS(JetContext({"x", "t"}, {"u"}, 0), InvalidContext);
  CHECK_THROWS_AS(JetContext({"D"}, {"u"}), InvalidContext);
  CHECK_NOTHROW(JetContext({"x", "t"}, {"u"}, 1));
}

TEST_CASE("parsing and printing round-trip") {
  const auto ctx = jetcalc::testing::xt();
  const DiffPoly p = P(ctx, "u*u_x + u_{xx} - 3/2*u_x^2 + t^2*u_xx");
  CHECK(P(ctx, p.str(ctx)) == p);
  CHECK(P(ctx, "u_xt") == P(ctx, "u_tx"));
  CHECK(P(ctx, "(u + 1)^2") == P(ctx, "u^2 + 2*u + 1"));
  CHECK(P(ctx, "u/2").str(ctx) == "u/2");
  CHECK(P(ctx, "3*u/2").str(ctx) == "3*u/2");
  CHECK(P(ctx, "u_xx").str(ctx) == "u_{xx}");
  CHECK_THROWS_AS(P(ctx, "u +"), SyntaxError);
  CHECK_THROWS_AS(P(ctx, "v_x"), UnknownIdentifier);
  CHECK_THROWS_AS(P(ctx, "u_y"), UnknownIdentifier);
  CHECK_THROWS(P(ctx, "1/u"));
}

TEST_CASE("syntax errors report the offending position") {
  const auto ctx = jetcalc::testing::xt();
  try {
    P(ctx, "u + * 2");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.position() == 4);
  }
}

TEST_CASE("substitution and fixpoint") {
  const auto ctx = jetcalc::testing::xt();
  const VarId u = VarId::jet(0), ux = VarId::jet(0, MultiIndex::unit(0));
  CHECK(P(ctx, "u*u_x").substitute(std::map<VarId, DiffPoly>{{u, P(ctx, "u_x")}}) == P(ctx, "u_x^2"));
  CHECK(P(ctx, "u").substituteToFixpoint({{u, P(ctx, "u_x")}, {ux, P(ctx, "x")}}) == P(ctx, "x"));
  CHECK_THROWS_AS(P(ctx, "u").substituteToFixpoint({{u, P(ctx, "u_x")}, {ux, P(ctx, "u + 1")}}), CyclicSubstitution);
}

TEST_CASE("homotopy scalar integration") {
  const auto ctx = jetcalc::testing::xt();
  CHECK(P(ctx, "s^2*u + s").integrateScalar01() == P(ctx, "u/3 + 1/2"));
}

TEST_CASE("ring axioms on random polynomials") {
  std::mt19937 rng(20261015);
  const auto vars = jetcalc::testing::jetVars(2, {0}, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = jetcalc::testing::randomPoly(rng, vars, 3, 4);
    const auto b = jetcalc::testing::randomPoly(rng, vars, 3, 4);
    const auto c = jetcalc::testing::randomPoly(rng, vars, 2, 3);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK((a - a).isZero());
    for (const auto& v : vars) CHECK((a * b).partial(v) == a.partial(v) * b + a * b.partial(v));
  }
}

TEST_CASE("printed form re-parses to the same polynomial") {
  std::mt19937 rng(7);
  const JetContext ctx({"x", "t"}, {"u", "v"}, 1);
  auto vars = jetcalc::testing::jetVars(2, {0, 1}, 2);
  vars.push_back(VarId::base(0));
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = jetcalc::testing::randomPoly(rng, vars, 4, 5);
    CHECK(P(ctx, a.str(ctx)) == a);
  }
}
