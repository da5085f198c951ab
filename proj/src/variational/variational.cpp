#include "jetcalc/variational.hpp"

#include <algorithm>

#include "jetcalc/cdiff.hpp"

namespace jetcalc {

std::size_t currentDirection(const JetContext& ctx, std::size_t k) {
  if (k >= ctx.independentCount()) throw DimensionMismatch("current component index out of range");
  if (!ctx.time()) return k;
  if (k == 0) return *ctx.time();
  return ctx.spatial().at(k - 1);
}

std::vector<DiffPoly> euler(const JetContext& ctx, const DiffPoly& density) {
  const std::size_t m = ctx.dependentCount();
  std::size_t tests = ctx.testCovectors().size();
  const auto vars = density.variables();
  for (const auto& v : vars) {
    if (v.kind == VarKind::Nonlocal)
      throw NonlocalVariablePresent("Euler operator applied to a density with nonlocal variables");
    if (v.kind == VarKind::TestCovector) tests = std::max<std::size_t>(tests, v.index + 1);
  }
  std::vector<DiffPoly> out(m + tests);
  for (const auto& v : vars) {
    if (!v.isJetLike()) continue;
    const std::size_t slot = v.kind == VarKind::Jet ? v.index : m + v.index;
    DiffPoly d = totalDerivative(ctx, v.sigma, density.partial(v));
    if (v.sigma.order() % 2 == 1) d = -d;
    out[slot] += d;
  }
  return out;
}

bool isDivergence(const JetContext& ctx, const DiffPoly& density) {
  for (const auto& c : euler(ctx, density))
    if (!c.isZero()) return false;
  return true;
}

namespace {

DiffPoly antiderivative(const DiffPoly& p, const VarId& z) {
  DiffPoly out;
  for (const auto& [m, c] : p.terms()) {
    const unsigned e = m.exponent(z);
    out.addTerm(c / Rational(static_cast<long>(e) + 1), m.withExponent(z, e + 1));
  }
  return out;
}

}  // namespace

DiffPoly dxInverse(const JetContext& ctx, const DiffPoly& g, std::size_t i, std::span<const Potential> potentials) {
  if (i >= ctx.independentCount()) throw Error("integration direction out of range");
  auto findPotentialOfJet = [&](const VarId& jet) -> const Potential* {
    for (const auto& p : potentials)
      if (p.jet == jet) return &p;
    return nullptr;
  };
  auto findPotential = [&](const VarId& w) -> const Potential* {
    for (const auto& p : potentials)
      if (p.nonlocal == w) return &p;
    return nullptr;
  };
  auto derivative = [&](const DiffPoly& p) {
    return p.derive([&](const VarId& v) -> std::optional<DiffPoly> {
      switch (v.kind) {
        case VarKind::Base:
          return v.index == i ? std::optional<DiffPoly>(DiffPoly(1)) : std::nullopt;
        case VarKind::Jet:
        case VarKind::TestCovector:
          return DiffPoly::variable(v.withSigma(v.sigma.plus(i)));
        case VarKind::Nonlocal: {
          const Potential* pot = findPotential(v);
          if (!pot) throw NotExactDerivative("no potential known for nonlocal variable " + ctx.name(v), p);
          return DiffPoly::variable(pot->jet).scaled(pot->scale);
        }
        default:
          return std::nullopt;
      }
    });
  };
  // Order in direction i; potentials sit one below their jet.
  auto orderOf = [&](const VarId& v) -> std::optional<int> {
    if (v.isJetLike()) return static_cast<int>(v.sigma.count(i));
    if (v.kind == VarKind::Nonlocal) {
      if (!findPotential(v)) return std::nullopt;
      return static_cast<int>(findPotential(v)->jet.sigma.count(i)) - 1;
    }
    return std::nullopt;
  };

  DiffPoly remainder = g;
  DiffPoly result;
  std::vector<DiffPoly> history;
  for (int step = 0; step < 10000; ++step) {
    if (remainder.isZero()) return result;
    for (const auto& seen : history)
      if (seen == remainder) throw NotExactDerivative("not an exact total derivative", remainder);
    history.push_back(remainder);

    int top = -2;
    VarId topVar;
    bool any = false;
    for (const auto& v : remainder.variables()) {
      if (v.kind == VarKind::Nonlocal && !findPotential(v))
        throw NotExactDerivative("nonlocal variable " + ctx.name(v) + " has no known potential", remainder);
      auto o = orderOf(v);
      if (!o) continue;
      any = true;
      if (*o > top || (*o == top && topVar < v)) {
        top = *o;
        topVar = v;
      }
    }
    if (!any) return result + antiderivative(remainder, VarId::base(i));
    if (top < 0) throw NotExactDerivative("not an exact total derivative", remainder);
    if (remainder.degreeIn(topVar) > 1) throw NotExactDerivative("not an exact total derivative", remainder);
    const DiffPoly coeff = remainder.partial(topVar);
    const bool clash = coeff.containsAny([&](const VarId& v) {
      auto o = orderOf(v);
      return o && *o >= top;
    });
    if (clash) throw NotExactDerivative("not an exact total derivative", remainder);

    DiffPoly piece;
    if (top >= 1) {
      piece = antiderivative(coeff, topVar.withSigma(topVar.sigma.minus(MultiIndex::unit(i))));
    } else {
      const Potential* pot = findPotentialOfJet(topVar);
      if (!pot) throw NotExactDerivative("not an exact total derivative", remainder);
      piece = antiderivative(coeff, pot->nonlocal).scaled(Rational(1) / pot->scale);
    }
    result += piece;
    remainder -= derivative(piece);
  }
  throw NotExactDerivative("integration did not terminate", remainder);
}

bool selfAdjointTest(const JetContext& ctx, std::span<const DiffPoly> psi) {
  if (psi.size() != ctx.dependentCount())
    throw DimensionMismatch("self-adjointness test needs one component per dependent variable");
  for (const auto& p : psi)
    if (p.containsAny([](const VarId& v) { return v.kind == VarKind::Nonlocal; }))
      throw NonlocalVariablePresent("self-adjointness test on a nonlocal function");
  const auto regime = FreeJets::make(ctx);
  const CDiffOp l = linearizationOf(regime, psi);
  return l == adjoint(l);
}

Density homotopyLagrangian(const JetContext& ctx, std::span<const DiffPoly> psi) {
  if (!selfAdjointTest(ctx, psi)) throw NotVariational("linearization is not self-adjoint: no Lagrangian exists");
  const DiffPoly s = DiffPoly::variable(VarId::homotopyScalar());
  DiffPoly integrand;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    DiffPoly scaled = psi[j].substitute([&](const VarId& v) -> std::optional<DiffPoly> {
      if (v.kind != VarKind::Jet) return std::nullopt;
      return s * DiffPoly::variable(v);
    });
    integrand += DiffPoly::variable(VarId::jet(j)) * scaled;
  }
  return Density{integrand.integrateScalar01()};
}

DiffPoly conservationResidual(const EvolutionSystem& sys, const ConservedCurrent& current) {
  const JetContext& ctx = sys.context();
  if (current.components.size() != ctx.independentCount())
    throw DimensionMismatch("current needs one component per independent variable");
  DiffPoly total;
  for (std::size_t k = 0; k < current.components.size(); ++k)
    total += sys.total(currentDirection(ctx, k), sys.toInternal(current.components[k]));
  return sys.toInternal(total);
}

bool verifyConservedCurrent(const EvolutionSystem& sys, const ConservedCurrent& current) {
  return conservationResidual(sys, current).isZero();
}

std::vector<DiffPoly> generatingFunctionResidual(const EvolutionPtr& sys, std::span<const DiffPoly> psi) {
  const std::size_t m = sys->context().dependentCount();
  if (psi.size() != m) throw DimensionMismatch("generating function needs one component per dependent variable");
  auto out = applyOp(adjoint(rhsLinearization(sys)), psi);
  for (std::size_t j = 0; j < m; ++j) out[j] += sys->restrictedTime(psi[j]);
  return out;
}

std::vector<DiffPoly> generatingFunction(const EvolutionPtr& sys, const ConservedCurrent& current) {
  if (!verifyConservedCurrent(*sys, current)) throw NotConserved("current is not conserved on the equation");
  auto psi = euler(sys->context(), sys->toInternal(current.components.at(0)));
  psi.resize(sys->context().dependentCount());
  for (const auto& r : generatingFunctionResidual(sys, psi))
    if (!r.isZero()) throw VerificationFailed("generating function fails D_t(psi) + l_f^*(psi) = 0");
  return psi;
}

ConservedCurrent currentFromGF(const EvolutionPtr& sys, std::span<const DiffPoly> psi) {
  const JetContext& ctx = sys->context();
  if (ctx.independentCount() != 2)
    throw PreconditionFailed("current reconstruction needs exactly one spatial variable");
  for (const auto& r : generatingFunctionResidual(sys, psi))
    if (!r.isZero()) throw NotGeneratingFunction("psi does not satisfy D_t(psi) + l_f^*(psi) = 0");
  Density density;
  try {
    density = homotopyLagrangian(ctx, psi);
  } catch (const NotVariational&) {
    throw NotGeneratingFunction("psi is not variational, so it is not a generating function");
  }
  const std::size_t x = ctx.spatial().at(0);
  DiffPoly flux = dxInverse(ctx, -sys->restrictedTime(density.value), x);
  return ConservedCurrent{{density.value, flux}};
}

ConservedCurrent trivialCurrent(const EvolutionSystem& sys, const std::vector<std::vector<DiffPoly>>& skew) {
  const JetContext& ctx = sys.context();
  const std::size_t n = ctx.independentCount();
  if (skew.size() != n) throw DimensionMismatch("skew matrix must be n x n");
  ConservedCurrent out;
  out.components.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (skew[k].size() != n) throw DimensionMismatch("skew matrix must be n x n");
    for (std::size_t l = 0; l < n; ++l) {
      if (!(skew[k][l] + skew[l][k]).isZero()) throw PreconditionFailed("matrix is not skew-symmetric");
      out.components[k] += sys.total(currentDirection(ctx, l), skew[k][l]);
    }
  }
  return out;
}

}  // namespace jetcalc
