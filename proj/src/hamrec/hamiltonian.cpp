#include <algorithm>
#include <string>

#include "jetcalc/hamrec.hpp"

namespace jetcalc {

bool isSkewAdjoint(const CDiffOp& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("Hamiltonian candidate must be square");
  return (a + adjoint(a)).isZero();
}

JacobiDensity jacobiDensity(const CDiffOp& a) {
  const JetContext& ctx = a.context();
  const std::size_t m = ctx.dependentCount();
  if (a.rows() != m || a.cols() != m) throw DimensionMismatch("Hamiltonian candidate must be m x m");

  std::vector<std::string> names = ctx.testCovectors();
  const std::size_t first = names.size();
  for (const char* stem : {"p", "q", "r"}) {
    for (std::size_t j = 0; j < m; ++j) {
      std::string name = m == 1 ? stem : std::string(stem) + std::to_string(j + 1);
      while (ctx.resolve(name) || std::find(names.begin(), names.end(), name) != names.end()) name += "0";
      names.push_back(name);
    }
  }
  JetContext extended = ctx.withTestCovectors(names);
  const RegimePtr regime = FreeJets::make(extended);
  const CDiffOp op = withRegime(a, regime);

  auto covector = [&](std::size_t slot) {
    std::vector<DiffPoly> v;
    for (std::size_t j = 0; j < m; ++j) v.push_back(DiffPoly::variable(VarId::testCovector(first + slot * m + j)));
    return v;
  };
  const auto p = covector(0), q = covector(1), r = covector(2);

  auto term = [&](const std::vector<DiffPoly>& x, const std::vector<DiffPoly>& y, const std::vector<DiffPoly>& z) {
    const auto phi = applyOp(op, x);
    const CDiffOp lin = op.mapCoefficients([&](const DiffPoly& c) { return evolutionaryField(*regime, phi, c); });
    const auto v = applyOp(lin, y);
    DiffPoly s;
    for (std::size_t j = 0; j < m; ++j) s += v[j] * z[j];
    return s;
  };
  DiffPoly density = term(p, q, r) + term(q, r, p) + term(r, p, q);
  return JacobiDensity{std::move(extended), std::move(density)};
}

bool jacobiCheck(const CDiffOp& a) {
  if (!isSkewAdjoint(a)) throw PreconditionFailed("operator is not skew-adjoint");
  const auto jd = jacobiDensity(a);
  return isDivergence(jd.context, jd.density);
}

EvolutionPtr hamiltonianFlow(const CDiffOp& a, const Density& h) {
  const JetContext& ctx = a.context();
  const std::size_t m = ctx.dependentCount();
  if (a.rows() != m || a.cols() != m) throw DimensionMismatch("Hamiltonian operator must be m x m");
  auto e = euler(ctx, h.value);
  e.resize(m);
  auto f = applyOp(a, e);
  if (ctx.time()) return EvolutionSystem::make(ctx, std::move(f));
  auto independents = ctx.independents();
  if (ctx.resolve("t")) throw InvalidContext("cannot add a time variable: 't' is already declared");
  independents.push_back("t");
  JetContext timed(independents, ctx.dependents(), independents.size() - 1, ctx.parameters());
  return EvolutionSystem::make(std::move(timed), std::move(f));
}

bool PoissonBracket::vanishes() const {
  for (const auto& c : eulerImage)
    if (!c.isZero()) return false;
  return true;
}

PoissonBracket poissonBracket(const CDiffOp& a, const Density& h1, const Density& h2) {
  if (!isSkewAdjoint(a)) throw PreconditionFailed("operator is not skew-adjoint");
  const JetContext& ctx = a.context();
  const std::size_t m = ctx.dependentCount();
  auto e1 = euler(ctx, h1.value);
  auto e2 = euler(ctx, h2.value);
  e1.resize(m);
  e2.resize(m);
  const auto flow = applyOp(a, e1);
  PoissonBracket out;
  for (std::size_t j = 0; j < m; ++j) out.density += flow[j] * e2[j];
  out.eulerImage = euler(ctx, out.density);
  return out;
}

std::vector<DiffPoly> gfToSymmetry(const CDiffOp& a, const EvolutionPtr& sys, std::span<const DiffPoly> psi) {
  auto phi = applyOp(a, psi);
  for (const auto& r : symmetryResidual(sys, phi))
    if (!r.isZero())
      throw VerificationFailed("A(psi) is not a symmetry of the flow: residual " + r.str(sys->context()));
  return phi;
}

}  // namespace jetcalc
