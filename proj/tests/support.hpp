#pragma once

#include <random>
#include <string>
#include <vector>

#include "jetcalc/context.hpp"
#include "jetcalc/diff_poly.hpp"
#include "jetcalc/expr.hpp"
#include "jetcalc/jetspace.hpp"

namespace jetcalc::testing {

inline JetContext xt(std::vector<std::string> deps = {"u"}) { return JetContext({"x", "t"}, std::move(deps), 1); }

inline DiffPoly P(const JetContext& ctx, std::string_view text) { return parsePoly(text, ctx); }

/// Random polynomial in the given variables with small integer/rational coefficients.
inline DiffPoly randomPoly(std::mt19937& rng, const std::vector<VarId>& vars, unsigned maxDeg, int terms) {
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<int> den(1, 3);
  std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
  std::uniform_int_distribution<unsigned> deg(0, maxDeg);
  DiffPoly out;
  for (int k = 0; k < terms; ++k) {
    std::vector<Monomial::Factor> f;
    const unsigned d = deg(rng);
    for (unsigned e = 0; e < d; ++e) f.emplace_back(vars[pick(rng)], 1);
    out.addTerm(Rational(coef(rng), den(rng)), Monomial::fromFactors(f));
  }
  return out;
}

/// Jet variables u^j_sigma for sigma over the given directions up to maxOrder.
inline std::vector<VarId> jetVars(std::size_t m, const std::vector<std::size_t>& dirs, unsigned maxOrder) {
  std::vector<VarId> out;
  for (std::size_t j = 0; j < m; ++j)
    for (const auto& s : MultiIndex::upTo(dirs, maxOrder)) out.push_back(VarId::jet(j, s));
  return out;
}

}  // namespace jetcalc::testing
