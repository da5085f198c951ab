#include "jetcalc/jetspace.hpp"

#include "jetcalc/errors.hpp"

namespace jetcalc {

DiffPoly totalDerivative(const JetContext& ctx, std::size_t i, const DiffPoly& p) {
  if (i >= ctx.independentCount()) throw Error("total derivative direction out of range");
  return p.derive([&](const VarId& v) -> std::optional<DiffPoly> {
    switch (v.kind) {
      case VarKind::Base:
        return v.index == i ? std::optional<DiffPoly>(DiffPoly(1)) : std::nullopt;
      case VarKind::Jet:
      case VarKind::TestCovector:
        return DiffPoly::variable(v.withSigma(v.sigma.plus(i)));
      case VarKind::Nonlocal:
        throw NonlocalVariablePresent("free total derivative applied to an expression with nonlocal variable '" +
                                      ctx.name(v) + "'; use the covering's extended derivative");
      default:
        return std::nullopt;
    }
  });
}

DiffPoly totalDerivative(const JetContext& ctx, const MultiIndex& sigma, const DiffPoly& p) {
  DiffPoly r = p;
  for (auto d : sigma.directions()) {
    if (r.isZero()) break;
    r = totalDerivative(ctx, d, r);
  }
  return r;
}

DiffPoly JetRegime::total(const MultiIndex& sigma, const DiffPoly& p) const {
  DiffPoly r = p;
  for (auto d : sigma.directions()) {
    if (r.isZero()) break;
    r = total(d, r);
  }
  return r;
}

bool FreeJets::sameAs(const JetRegime& other) const {
  const auto* f = dynamic_cast<const FreeJets*>(&other);
  return f != nullptr && f->ctx_ == ctx_;
}

std::vector<DiffPoly> prolong(const GeneralSystem& sys, unsigned order) {
  std::vector<DiffPoly> out;
  const std::size_t n = sys.ctx.independentCount();
  for (const auto& F : sys.equations) {
    for (unsigned r = 0; r <= order; ++r)
      for (const auto& sigma : MultiIndex::ofOrder(n, r)) out.push_back(totalDerivative(sys.ctx, sigma, F));
  }
  return out;
}

// ---- EvolutionSystem --------------------------------------------------------

namespace {

bool hasTime(const JetContext& ctx, const VarId& v) {
  return v.kind == VarKind::Jet && ctx.time() && v.sigma.count(*ctx.time()) > 0;
}

}  // namespace

EvolutionSystem::EvolutionSystem(JetContext ctx, std::vector<DiffPoly> rhs)
    : ctx_(std::move(ctx)), rhs_(std::move(rhs)) {
  if (!ctx_.time()) throw InvalidContext("an evolution system needs a designated time variable");
  if (rhs_.size() != ctx_.dependentCount())
    throw DimensionMismatch("evolution system needs one right-hand side per dependent variable");
  for (std::size_t j = 0; j < rhs_.size(); ++j) {
    if (!isInternal(rhs_[j]))
      throw NotInternal("right-hand side for " + ctx_.dependents()[j] + "_t contains time derivatives");
    if (rhs_[j].containsAny([](const VarId& v) {
          return v.kind == VarKind::Nonlocal || v.kind == VarKind::TestCovector || v.kind == VarKind::Unknown ||
                 v.kind == VarKind::HomotopyScalar;
        }))
      throw InvalidContext("right-hand side may only involve base, jet and parameter variables");
  }
}

unsigned EvolutionSystem::order() const {
  unsigned k = 0;
  for (const auto& f : rhs_)
    for (const auto& v : f.variables())
      if (v.kind == VarKind::Jet) k = std::max(k, v.sigma.order());
  return k;
}

bool EvolutionSystem::isInternal(const DiffPoly& p) const {
  return !p.containsAny([&](const VarId& v) { return hasTime(ctx_, v); });
}

DiffPoly EvolutionSystem::internalJet(std::size_t j, const MultiIndex& sigma) const {
  const std::size_t t = timeIndex();
  if (sigma.count(t) == 0) return DiffPoly::variable(VarId::jet(j, sigma));
  const auto key = std::make_pair(j, sigma);
  {
    std::lock_guard<std::mutex> lock(cacheMutex_);
    auto it = jetCache_.find(key);
    if (it != jetCache_.end()) return it->second;
  }
  DiffPoly value;
  const MultiIndex reduced = sigma.minus(MultiIndex::unit(t));
  if (reduced.count(t) == 0)
    value = totalDerivative(ctx_, reduced, rhs_[j]);
  else
    value = restrictedTime(internalJet(j, reduced));
  std::lock_guard<std::mutex> lock(cacheMutex_);
  return jetCache_.emplace(key, std::move(value)).first->second;
}

DiffPoly EvolutionSystem::restrictedTime(const DiffPoly& p) const {
  const std::size_t t = timeIndex();
  if (!isInternal(p)) throw NotInternal("restricted time derivative needs internal coordinates");
  return p.derive([&](const VarId& v) -> std::optional<DiffPoly> {
    switch (v.kind) {
      case VarKind::Base:
        return v.index == t ? std::optional<DiffPoly>(DiffPoly(1)) : std::nullopt;
      case VarKind::Jet:
        return internalJet(v.index, v.sigma.plus(t));
      case VarKind::TestCovector:
        return DiffPoly::variable(v.withSigma(v.sigma.plus(t)));
      case VarKind::Nonlocal:
        throw NonlocalVariablePresent("restricted derivative applied to nonlocal variable '" + ctx_.name(v) + "'");
      default:
        return std::nullopt;
    }
  });
}

DiffPoly EvolutionSystem::total(std::size_t i, const DiffPoly& p) const {
  if (i == timeIndex()) return restrictedTime(p);
  return totalDerivative(ctx_, i, p);
}

DiffPoly EvolutionSystem::toInternal(const DiffPoly& p) const {
  return p.substitute([&](const VarId& v) -> std::optional<DiffPoly> {
    if (!hasTime(ctx_, v)) return std::nullopt;
    return internalJet(v.index, v.sigma);
  });
}

}  // namespace jetcalc
