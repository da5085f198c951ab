#include <algorithm>
#include <string>

#include "jetcalc/hamrec.hpp"

namespace jetcalc {

namespace {

// Throws unless every variable of p lives on the covering with `visible`
// nonlocal variables in scope.
void checkScope(const JetContext& ctx, const DiffPoly& p, std::size_t visible, const char* what) {
  const std::size_t m = ctx.dependentCount();
  const auto time = ctx.time();
  for (const auto& v : p.variables()) {
    switch (v.kind) {
      case VarKind::Base:
        break;
      case VarKind::Jet:
        if (v.index >= m) throw ScopeError(std::string(what) + ": unknown dependent variable");
        if (time && v.sigma.count(*time) > 0)
          throw NotInternal(std::string(what) + ": time derivative " + ctx.name(v) + " is not an internal coordinate");
        break;
      case VarKind::Nonlocal:
        if (v.index >= visible)
          throw ScopeError(std::string(what) + ": nonlocal variable " + ctx.name(v) + " is not in scope");
        break;
      case VarKind::Parameter:
        if (v.index >= ctx.parameters().size()) throw ScopeError(std::string(what) + ": unknown parameter");
        break;
      default:
        throw ScopeError(std::string(what) + ": variable " + ctx.name(v) + " is not a covering coordinate");
    }
  }
}

}  // namespace

JetContext coveringContext(const JetContext& base, const std::vector<std::string>& names) {
  std::vector<NonlocalDecl> decls = base.nonlocals();
  for (const auto& name : names) decls.push_back({name, decls.size()});
  return base.withNonlocals(std::move(decls));
}

Covering::Covering(EvolutionPtr base, std::vector<CoveringLayer> layers)
    : base_(std::move(base)), layers_(std::move(layers)), ctx_(base_->context()) {
  if (!base_->context().nonlocals().empty()) throw InvalidContext("base system already declares nonlocal variables");
  std::vector<std::string> names;
  for (const auto& layer : layers_) names.push_back(layer.name);
  ctx_ = coveringContext(base_->context(), names);

  const std::size_t n = ctx_.independentCount();
  for (std::size_t a = 0; a < layers_.size(); ++a) {
    if (layers_[a].derivatives.size() != n)
      throw DimensionMismatch("nonlocal variable " + layers_[a].name + " needs one derivative per independent variable");
    for (const auto& x : layers_[a].derivatives) checkScope(ctx_, x, a, "covering");
  }
  for (std::size_t a = 0; a < layers_.size(); ++a)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        DiffPoly residue = total(i, expression(a, j)) - total(j, expression(a, i));
        if (!residue.isZero())
          throw NotFlat("covering is not flat: D_" + ctx_.independents()[i] + " D_" + ctx_.independents()[j] + " " +
                            layers_[a].name + " differs by " + residue.str(ctx_),
                        residue);
      }
}

DiffPoly Covering::total(std::size_t i, const DiffPoly& p) const {
  const std::size_t time = base_->timeIndex();
  return p.derive([&](const VarId& v) -> std::optional<DiffPoly> {
    switch (v.kind) {
      case VarKind::Base:
        return v.index == i ? std::optional<DiffPoly>(DiffPoly(1)) : std::nullopt;
      case VarKind::Jet:
        if (v.sigma.count(time) > 0) throw NotInternal("covering derivative of a non-internal coordinate");
        if (i == time) return base_->internalJet(v.index, v.sigma.plus(time));
        return DiffPoly::variable(v.withSigma(v.sigma.plus(i)));
      case VarKind::TestCovector:
        return DiffPoly::variable(v.withSigma(v.sigma.plus(i)));
      case VarKind::Nonlocal:
        if (v.index >= layers_.size()) throw ScopeError("nonlocal variable outside the covering");
        return expression(v.index, i);
      default:
        return std::nullopt;
    }
  });
}

DiffPoly extendedDerivative(const Covering& cov, std::size_t i, const DiffPoly& p) {
  if (i >= cov.context().independentCount()) throw ScopeError("direction out of range");
  checkScope(cov.context(), p, cov.layers().size(), "extended derivative");
  return cov.total(i, p);
}

const EvolutionSystem& underlyingSystem(const JetRegime& regime) {
  if (const auto* evo = dynamic_cast<const EvolutionSystem*>(&regime)) return *evo;
  if (const auto* cov = dynamic_cast<const Covering*>(&regime)) return *cov->base();
  throw PreconditionFailed("regime is neither an evolution system nor a covering");
}

namespace {

EvolutionPtr underlyingPtr(const RegimePtr& regime) {
  if (auto evo = std::dynamic_pointer_cast<const EvolutionSystem>(regime)) return evo;
  if (auto cov = std::dynamic_pointer_cast<const Covering>(regime)) return cov->base();
  throw PreconditionFailed("regime is neither an evolution system nor a covering");
}

}  // namespace

CDiffOp withRegime(const CDiffOp& op, RegimePtr regime) {
  CDiffOp out(std::move(regime), op.rows(), op.cols());
  for (std::size_t r = 0; r < op.rows(); ++r)
    for (std::size_t c = 0; c < op.cols(); ++c)
      for (const auto& [sigma, a] : op.entry(r, c)) out.addTerm(r, c, sigma, a);
  return out;
}

std::vector<DiffPoly> symmetryResidual(const RegimePtr& regime, std::span<const DiffPoly> phi) {
  const auto sys = underlyingPtr(regime);
  if (phi.size() != sys->context().dependentCount())
    throw DimensionMismatch("symmetry needs one component per dependent variable");
  auto out = applyOp(withRegime(rhsLinearization(sys), regime), phi);
  for (std::size_t b = 0; b < phi.size(); ++b) out[b] = regime->total(sys->timeIndex(), phi[b]) - out[b];
  return out;
}

std::vector<CartanShadow> shadowResidual(const RegimePtr& regime, std::span<const CartanShadow> omega) {
  const auto sys = underlyingPtr(regime);
  const std::size_t m = sys->context().dependentCount();
  if (omega.size() != m) throw DimensionMismatch("shadow needs one component per dependent variable");
  std::map<std::pair<std::size_t, MultiIndex>, CartanShadow> derived;
  auto derivative = [&](std::size_t a, const MultiIndex& sigma) -> const CartanShadow& {
    auto key = std::make_pair(a, sigma);
    auto it = derived.find(key);
    if (it != derived.end()) return it->second;
    CartanShadow form = omega[a];
    for (std::size_t i : sigma.directions()) form = formTotal(*regime, i, form);
    return derived.emplace(key, std::move(form)).first->second;
  };
  std::vector<CartanShadow> out(m);
  for (std::size_t b = 0; b < m; ++b) {
    out[b] = formTotal(*regime, sys->timeIndex(), omega[b]);
    const DiffPoly& f = sys->rhs()[b];
    for (const auto& v : f.variables())
      if (v.kind == VarKind::Jet) out[b] -= derivative(v.index, v.sigma).times(f.partial(v));
  }
  return out;
}

std::vector<DiffPoly> applyShadow(const RegimePtr& regime, std::span<const CartanShadow> shadow,
                                  std::span<const DiffPoly> phi) {
  const JetContext& ctx = regime->context();
  const std::size_t m = ctx.dependentCount();
  if (shadow.size() != m || phi.size() != m) throw DimensionMismatch("shadow and symmetry need m components");

  std::vector<Contraction> parts;
  std::size_t needed = 0;
  for (const auto& s : shadow) {
    parts.push_back(contract(*regime, phi, s));
    for (const auto& [a, c] : parts.back().residue) needed = std::max(needed, a + 1);
  }

  std::vector<DiffPoly> lifts;
  if (needed > 0) {
    const auto* cov = dynamic_cast<const Covering*>(regime.get());
    if (!cov) throw ScopeError("shadow has nonlocal terms but no covering is present");
    const auto spatial = ctx.spatial();
    if (spatial.size() != 1) throw PreconditionFailed("nonlocal terms need exactly one spatial variable");
    const std::size_t x = spatial[0];
    std::vector<Potential> potentials;
    for (std::size_t a = 0; a < cov->layers().size(); ++a) {
      const DiffPoly& xa = cov->expression(a, x);
      if (xa.size() != 1) continue;
      const auto& [mono, c] = *xa.terms().begin();
      if (mono.degree() == 1 && mono.factors()[0].first.kind == VarKind::Jet)
        potentials.push_back({VarId::nonlocal(a, a), mono.factors()[0].first, c});
    }
    for (std::size_t a = 0; a < needed; ++a) {
      const DiffPoly integrand = evolutionaryField(*regime, phi, cov->expression(a, x), lifts);
      try {
        lifts.push_back(dxInverse(ctx, integrand, x, potentials));
      } catch (const NotExactDerivative&) {
        throw NonlocalObstruction("nonlocal term " + integrand.str(ctx) +
                                      " is not a total x-derivative in this covering",
                                  integrand);
      }
    }
  }

  std::vector<DiffPoly> out;
  for (const auto& part : parts) {
    DiffPoly value = part.value;
    for (const auto& [a, c] : part.residue) value += c * lifts[a];
    out.push_back(std::move(value));
  }
  for (const auto& r : symmetryResidual(regime, out))
    if (!r.isZero()) throw VerificationFailed("shadow image is not a symmetry: residual " + r.str(ctx));
  return out;
}

}  // namespace jetcalc
