#include <doctest.h>

#include <random>

#include "jetcalc/errors.hpp"
#include "jetcalc/jetspace.hpp"
#include "support.hpp"

using namespace jetcalc;
using jetcalc::testing::P;

TEST_CASE("free total derivative") {
  const auto ctx = jetcalc::testing::xt();
  CHECK(totalDerivative(ctx, 0, P(ctx, "x*u^2")) == P(ctx, "u^2 + 2*x*u*u_x"));
  CHECK(totalDerivative(ctx, 1, P(ctx, "u_x")) == P(ctx, "u_xt"));
  const JetContext nl = ctx.withNonlocals({{"w", 0}});
  CHECK_THROWS_AS(totalDerivative(nl, 0, P(nl, "w")), NonlocalVariablePresent);
}

TEST_CASE("free total derivatives commute") {
  std::mt19937 rng(11);
  const JetContext ctx({"x", "y", "t"}, {"u", "v"}, 2);
  auto vars = jetcalc::testing::jetVars(2, {0, 1, 2}, 2);
  vars.push_back(VarId::base(0));
  vars.push_back(VarId::base(2));
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = jetcalc::testing::randomPoly(rng, vars, 3, 4);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < 3; ++k)
        CHECK(totalDerivative(ctx, i, totalDerivative(ctx, k, p)) == totalDerivative(ctx, k, totalDerivative(ctx, i, p)));
  }
}

TEST_CASE("prolongation ordering") {
  const JetContext ctx({"x"}, {"u"});
  GeneralSystem sys{ctx, {P(ctx, "u_xx - u"), P(ctx, "u_x")}};
  const auto pr = prolong(sys, 1);
  REQUIRE(pr.size() == 4);
  CHECK(pr[0] == P(ctx, "u_xx - u"));
  CHECK(pr[1] == P(ctx, "u_xxx - u_x"));
  CHECK(pr[2] == P(ctx, "u_x"));
  CHECK(pr[3] == P(ctx, "u_xx"));
}

TEST_CASE("evolution system internal coordinates") {
  const auto ctx = jetcalc::testing::xt();
  const auto burgers = EvolutionSystem::make(ctx, {P(ctx, "u*u_x + u_xx")});
  CHECK(burgers->order() == 2);
  CHECK(burgers->restrictedTime(P(ctx, "u")) == P(ctx, "u*u_x + u_xx"));
  CHECK(burgers->toInternal(P(ctx, "u_t")) == P(ctx, "u*u_x + u_xx"));
  CHECK(burgers->toInternal(P(ctx, "u_xt")) == P(ctx, "u_x^2 + u*u_xx + u_xxx"));
  CHECK(burgers->isInternal(P(ctx, "u_xx")));
  CHECK_FALSE(burgers->isInternal(P(ctx, "u_t")));
  CHECK_THROWS_AS(burgers->restrictedTime(P(ctx, "u_t")), NotInternal);
  CHECK_THROWS(EvolutionSystem::make(ctx, {P(ctx, "u_t")}));
  CHECK_THROWS(EvolutionSystem::make(JetContext({"x"}, {"u"}), {P(JetContext({"x"}, {"u"}), "u")}));
}

TEST_CASE("restricted derivatives commute on evolution systems") {
  std::mt19937 rng(3);
  const JetContext ctx({"x", "t"}, {"v", "w"}, 1);
  const auto nls = EvolutionSystem::make(ctx, {P(ctx, "w_xx + (v^2 + w^2)*w"), P(ctx, "-v_xx - (v^2 + w^2)*v")});
  auto vars = jetcalc::testing::jetVars(2, {0}, 3);
  vars.push_back(VarId::base(0));
  vars.push_back(VarId::base(1));
  for (int trial = 0; trial < 15; ++trial) {
    const auto p = jetcalc::testing::randomPoly(rng, vars, 3, 4);
    CHECK(nls->total(0, nls->total(1, p)) == nls->total(1, nls->total(0, p)));
  }
}

TEST_CASE("internal-coordinate rewriting agrees with restricted derivatives") {
  const auto ctx = jetcalc::testing::xt();
  const auto kdv = EvolutionSystem::make(ctx, {P(ctx, "u*u_x + u_xxx")});
  const auto p = P(ctx, "u^2*u_x");
  CHECK(kdv->toInternal(totalDerivative(ctx, 1, p)) == kdv->restrictedTime(p));
  const auto sigma = MultiIndex::fromDirections({0, 1, 1});
  CHECK(kdv->internalJet(0, sigma) == kdv->total(sigma, P(ctx, "u")));
}
