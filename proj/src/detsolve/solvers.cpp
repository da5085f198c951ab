#include <algorithm>
#include <future>

#include "jetcalc/detsolve.hpp"
#include "jetcalc/variational.hpp"

namespace jetcalc {

namespace {

DiffPoly bind(const DiffPoly& p, const std::map<VarId, DiffPoly>& b) { return p.substitute(b); }

CartanShadow bind(const CartanShadow& s, const std::map<VarId, DiffPoly>& b) {
  return s.mapCoefficients([&](const DiffPoly& c) { return c.substitute(b); });
}

template <class T>
std::vector<T> bindAll(const std::vector<T>& templ, const std::map<VarId, DiffPoly>& b) {
  std::vector<T> out;
  out.reserve(templ.size());
  for (const auto& t : templ) out.push_back(bind(t, b));
  return out;
}

void flatten(const DiffPoly& p, std::vector<DiffPoly>& out) { out.push_back(p); }

void flatten(const CartanShadow& s, std::vector<DiffPoly>& out) {
  for (const auto& [gen, c] : s.coefficients()) out.push_back(c);
}

template <class T>
std::vector<T> sum(std::vector<T> a, const std::vector<T>& b) {
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
  return a;
}

// Residual of a template linear in the unknowns. With several jobs the
// unknowns are split into contiguous blocks whose residuals are summed;
// linearity makes the result independent of the split.
template <class T, class R>
auto shardedResidual(const std::vector<T>& templ, const std::vector<VarId>& unknowns, unsigned jobs, R residual) {
  using Out = decltype(residual(templ));
  const std::size_t shards = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(unknowns.size(), 1));
  if (shards == 1) return residual(templ);
  std::vector<std::future<Out>> parts;
  const std::size_t block = (unknowns.size() + shards - 1) / shards;
  for (std::size_t s = 0; s < shards; ++s) {
    std::map<VarId, DiffPoly> zero;
    for (std::size_t k = 0; k < unknowns.size(); ++k)
      if (k / block != s) zero.emplace(unknowns[k], DiffPoly());
    parts.push_back(std::async(std::launch::async, [&, zero = std::move(zero)] { return residual(bindAll(templ, zero)); }));
  }
  Out total = parts[0].get();
  for (std::size_t s = 1; s < parts.size(); ++s) total = sum(std::move(total), parts[s].get());
  return total;
}

template <class T, class R>
Solutions<std::vector<T>> solve(const std::vector<T>& templ, const std::vector<VarId>& unknowns, unsigned jobs,
                                R residual, const char* what) {
  const auto res = shardedResidual(templ, unknowns, jobs, residual);
  std::vector<DiffPoly> exprs;
  for (const auto& r : res) flatten(r, exprs);
  const LinearSystem system = matchCoefficients(exprs, unknowns);
  const SolutionBasis basis = nullspace(system);

  Solutions<std::vector<T>> out;
  out.unknownCount = unknowns.size();
  out.equationCount = system.rows.size();
  for (std::size_t k = 0; k < basis.vectors.size(); ++k) {
    auto solution = bindAll(templ, bindings(basis, k));
    std::vector<DiffPoly> check;
    for (const auto& r : residual(solution)) flatten(r, check);
    for (const auto& c : check)
      if (!c.isZero()) throw VerificationFailed(std::string(what) + ": solver output fails re-substitution");
    out.basis.push_back(std::move(solution));
  }
  return out;
}

}  // namespace

Solutions<Vector> symmetries(const EvolutionPtr& sys, const Ansatz& a, const SolveOptions& opt) {
  const auto monos = buildAnsatz(sys->context(), a);
  Vector templ;
  std::vector<VarId> unknowns;
  for (std::size_t j = 0; j < sys->context().dependentCount(); ++j) {
    auto t = makeTemplate(monos, unknowns.size());
    templ.push_back(t.expr);
    unknowns.insert(unknowns.end(), t.unknowns.begin(), t.unknowns.end());
  }
  return solve(templ, unknowns, opt.jobs, [&](const Vector& phi) { return symmetryResidual(sys, phi); },
               "symmetries");
}

Solutions<Vector> generatingFunctions(const EvolutionPtr& sys, const Ansatz& a, const SolveOptions& opt) {
  const auto monos = buildAnsatz(sys->context(), a);
  Vector templ;
  std::vector<VarId> unknowns;
  for (std::size_t j = 0; j < sys->context().dependentCount(); ++j) {
    auto t = makeTemplate(monos, unknowns.size());
    templ.push_back(t.expr);
    unknowns.insert(unknowns.end(), t.unknowns.begin(), t.unknowns.end());
  }
  return solve(templ, unknowns, opt.jobs,
               [&](const Vector& psi) { return generatingFunctionResidual(sys, psi); }, "generating functions");
}

Solutions<ShadowVector> shadows(const EvolutionPtr& sys, const CoveringPtr& cov, const Ansatz& a,
                                const SolveOptions& opt) {
  if (cov && cov->base() != sys) throw RegimeMismatch("covering is over a different system");
  const RegimePtr regime = cov ? RegimePtr(cov) : RegimePtr(sys);
  const JetContext& ctx = sys->context();
  const auto monos = buildAnsatz(ctx, a);

  // Highest-order generators first, so the echelon pivot is the principal symbol.
  std::vector<VarId> generators;
  auto sigmas = MultiIndex::upTo(ctx.spatial(), a.jetOrder);
  std::reverse(sigmas.begin(), sigmas.end());
  for (const auto& sigma : sigmas)
    for (std::size_t j = 0; j < ctx.dependentCount(); ++j) generators.push_back(VarId::jet(j, sigma));
  if (cov)
    for (std::size_t l = 0; l < cov->layers().size(); ++l) generators.push_back(VarId::nonlocal(l, l));

  ShadowVector templ;
  std::vector<VarId> unknowns;
  for (std::size_t b = 0; b < ctx.dependentCount(); ++b) {
    CartanShadow component;
    for (const auto& g : generators) {
      auto t = makeTemplate(monos, unknowns.size());
      component.add(g, t.expr);
      unknowns.insert(unknowns.end(), t.unknowns.begin(), t.unknowns.end());
    }
    templ.push_back(std::move(component));
  }
  return solve(templ, unknowns, opt.jobs,
               [&](const ShadowVector& omega) { return shadowResidual(regime, omega); }, "shadows");
}

}  // namespace jetcalc
