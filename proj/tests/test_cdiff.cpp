#include <doctest.h>

#include <random>

#include "jetcalc/cdiff.hpp"
#include "jetcalc/errors.hpp"
#include "support.hpp"

using namespace jetcalc;
using jetcalc::testing::P;

namespace {

CDiffOp randomOp(std::mt19937& rng, const RegimePtr& regime, const std::vector<VarId>& vars, unsigned maxOrder) {
  CDiffOp op(regime, 1, 1);
  for (unsigned k = 0; k <= maxOrder; ++k)
    op.addTerm(0, 0, MultiIndex::fromCounts({k}), jetcalc::testing::randomPoly(rng, vars, 2, 2));
  return op;
}

}  // namespace

TEST_CASE("operator parsing and printing") {
  const JetContext ctx({"x"}, {"u"});
  const auto regime = FreeJets::make(ctx);
  const auto op = parseOperator("D_x^3 + 2/3*u*D_x + 1/3*u_x", regime);
  CHECK(op.str() == "D_x^3 + (2*u/3)*D_x + u_x/3");
  CHECK(applyScalar(op, P(ctx, "u")) == P(ctx, "u_xxx + u*u_x"));
  CHECK(parseOperator("D_x*u", regime) == parseOperator("u*D_x + u_x", regime));
  const auto m = parseOperator("[[D_x, 0], [0, D_x]]", regime);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 2);
}

TEST_CASE("composition agrees with successive application") {
  std::mt19937 rng(5);
  const JetContext ctx({"x"}, {"u"});
  const auto regime = FreeJets::make(ctx);
  const auto vars = jetcalc::testing::jetVars(1, {0}, 2);
  for (int trial = 0; trial < 15; ++trial) {
    const auto a = randomOp(rng, regime, vars, 2);
    const auto b = randomOp(rng, regime, vars, 2);
    const auto c = randomOp(rng, regime, vars, 1);
    const auto f = jetcalc::testing::randomPoly(rng, vars, 2, 3);
    CHECK(applyScalar(composeOps(a, b), f) == applyScalar(a, applyScalar(b, f)));
    CHECK(composeOps(composeOps(a, b), c) == composeOps(a, composeOps(b, c)));
  }
}

TEST_CASE("adjoint is an anti-involution") {
  std::mt19937 rng(9);
  const JetContext ctx({"x"}, {"u"});
  const auto regime = FreeJets::make(ctx);
  const auto vars = jetcalc::testing::jetVars(1, {0}, 2);
  for (int trial = 0; trial < 15; ++trial) {
    const auto a = randomOp(rng, regime, vars, 3);
    const auto b = randomOp(rng, regime, vars, 2);
    CHECK(adjoint(adjoint(a)) == a);
    CHECK(adjoint(composeOps(a, b)) == composeOps(adjoint(b), adjoint(a)));
  }
}

TEST_CASE("linearization of Burgers") {
  const auto ctx = jetcalc::testing::xt();
  const auto burgers = EvolutionSystem::make(ctx, {P(ctx, "u*u_x + u_xx")});
  const auto l = rhsLinearization(burgers);
  CHECK(l.str() == "D_x^2 + u*D_x + u_x");
  const auto full = linearization(burgers);
  CHECK(applyScalar(full, P(ctx, "u_x")).isZero());
  CHECK(applyScalar(full, P(ctx, "u*u_x + u_xx")).isZero());
  CHECK_FALSE(applyScalar(full, P(ctx, "u")).isZero());
}

TEST_CASE("operators from different regimes do not mix") {
  const auto ctx = jetcalc::testing::xt();
  const auto a = EvolutionSystem::make(ctx, {P(ctx, "u_xx")});
  const auto b = EvolutionSystem::make(ctx, {P(ctx, "u_xx")});
  CHECK_THROWS_AS(composeOps(CDiffOp::identity(a, 1), CDiffOp::identity(b, 1)), RegimeMismatch);
  CHECK_THROWS_AS(applyScalar(CDiffOp::derivative(a, MultiIndex::unit(1)), P(ctx, "u_t")), RegimeMismatch);
}

TEST_CASE("evolutionary fields commute with total derivatives") {
  std::mt19937 rng(17);
  const auto ctx = jetcalc::testing::xt();
  const auto regime = FreeJets::make(ctx);
  const auto vars = jetcalc::testing::jetVars(1, {0, 1}, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<DiffPoly> phi{jetcalc::testing::randomPoly(rng, vars, 2, 3)};
    const auto p = jetcalc::testing::randomPoly(rng, vars, 2, 3);
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(evolutionaryField(*regime, phi, totalDerivative(ctx, i, p)) ==
            totalDerivative(ctx, i, evolutionaryField(*regime, phi, p)));
  }
}

TEST_CASE("Jacobi bracket is antisymmetric and satisfies the Jacobi identity") {
  std::mt19937 rng(19);
  const JetContext ctx({"x"}, {"u"});
  const auto regime = FreeJets::make(ctx);
  const auto vars = jetcalc::testing::jetVars(1, {0}, 2);
  for (int trial = 0; trial < 8; ++trial) {
    const std::vector<DiffPoly> a{jetcalc::testing::randomPoly(rng, vars, 2, 2)};
    const std::vector<DiffPoly> b{jetcalc::testing::randomPoly(rng, vars, 2, 2)};
    const std::vector<DiffPoly> c{jetcalc::testing::randomPoly(rng, vars, 2, 2)};
    const auto ab = jacobiBracket(*regime, a, b);
    const auto ba = jacobiBracket(*regime, b, a);
    CHECK(ab[0] == -ba[0]);
    const auto j = jacobiBracket(*regime, a, jacobiBracket(*regime, b, c))[0] +
                   jacobiBracket(*regime, b, jacobiBracket(*regime, c, a))[0] +
                   jacobiBracket(*regime, c, jacobiBracket(*regime, a, b))[0];
    CHECK(j.isZero());
  }
}

TEST_CASE("Burgers symmetries bracket to zero with translations") {
  const auto ctx = jetcalc::testing::xt();
  const auto burgers = EvolutionSystem::make(ctx, {P(ctx, "u*u_x + u_xx")});
  const std::vector<DiffPoly> ux{P(ctx, "u_x")}, flow{P(ctx, "u*u_x + u_xx")};
  CHECK(jacobiBracket(*burgers, ux, flow)[0].isZero());
}

TEST_CASE("horizontal differential squares to zero") {
  std::mt19937 rng(23);
  const JetContext ctx({"x", "y", "t"}, {"u"}, 2);
  const auto regime = FreeJets::make(ctx);
  const auto vars = jetcalc::testing::jetVars(1, {0, 1, 2}, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = HorForm::function(jetcalc::testing::randomPoly(rng, vars, 2, 3));
    CHECK(horizontalDifferential(*regime, horizontalDifferential(*regime, f)).isZero());
    HorForm one;
    one.degree = 1;
    one.add({0}, jetcalc::testing::randomPoly(rng, vars, 2, 2));
    one.add({2}, jetcalc::testing::randomPoly(rng, vars, 2, 2));
    CHECK(horizontalDifferential(*regime, horizontalDifferential(*regime, one)).isZero());
  }
  HorForm top;
  top.degree = 3;
  top.add({0, 1, 2}, DiffPoly(1));
  CHECK_THROWS_AS(horizontalDifferential(*regime, top), DegreeOverflow);
}

TEST_CASE("wedge product sign rule") {
  HorForm a, b;
  a.degree = b.degree = 1;
  a.add({1}, DiffPoly(1));
  b.add({0}, DiffPoly(1));
  const auto ab = wedge(a, b);
  CHECK(ab.components.at({0, 1}) == DiffPoly(-1));
  CHECK(wedge(a, a).isZero());
}

TEST_CASE("Cartan forms and contraction") {
  const auto ctx = jetcalc::testing::xt();
  const auto burgers = EvolutionSystem::make(ctx, {P(ctx, "u*u_x + u_xx")});
  CartanShadow r = CartanShadow::omega(0, MultiIndex::unit(0));
  r += CartanShadow::omega(0).times(P(ctx, "u/2"));
  const std::vector<DiffPoly> ux{P(ctx, "u_x")};
  CHECK(contract(*burgers, ux, r).value == P(ctx, "u_xx + u*u_x/2"));
  CHECK(contract(*burgers, ux, cartanDifferential(P(ctx, "u^2"))).value == P(ctx, "2*u*u_x"));
  CHECK(formTotal(*burgers, 0, CartanShadow::omega(0)) == CartanShadow::omega(0, MultiIndex::unit(0)));
  CHECK(cartanDifferential(P(ctx, "u*u_x")).str(ctx) == "u_x*omega[u] + u*omega[u_x]");
}
