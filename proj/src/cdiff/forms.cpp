#include <algorithm>

#include "jetcalc/cdiff.hpp"
#include "jetcalc/errors.hpp"

namespace jetcalc {

namespace {

/// Sign of the permutation sorting `indices`; 0 when an index repeats.
int sortSign(std::vector<std::size_t>& indices) {
  int sign = 1;
  for (std::size_t i = 1; i < indices.size(); ++i) {
    for (std::size_t j = i; j > 0 && indices[j - 1] > indices[j]; --j) {
      std::swap(indices[j - 1], indices[j]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < indices.size(); ++i)
    if (indices[i - 1] == indices[i]) return 0;
  return sign;
}

}  // namespace

HorForm HorForm::function(const DiffPoly& p) {
  HorForm f;
  f.add({}, p);
  return f;
}

void HorForm::add(std::vector<std::size_t> indices, const DiffPoly& coefficient) {
  if (indices.size() != degree)
    throw DimensionMismatch("horizontal form component of the wrong degree");
  const int sign = sortSign(indices);
  if (sign == 0 || coefficient.isZero()) return;
  auto& slot = components[indices];
  slot += coefficient.scaled(Rational(sign));
  if (slot.isZero()) components.erase(indices);
}

HorForm horizontalDifferential(const JetRegime& regime, const HorForm& form) {
  const std::size_t n = regime.context().independentCount();
  if (form.degree >= n) throw DegreeOverflow("horizontal differential of a form of top degree");
  HorForm out;
  out.degree = form.degree + 1;
  for (const auto& [indices, a] : form.components) {
    for (std::size_t i = 0; i < n; ++i) {
      if (std::find(indices.begin(), indices.end(), i) != indices.end()) continue;
      DiffPoly d = regime.total(i, a);
      if (d.isZero()) continue;
      std::vector<std::size_t> idx;
      idx.reserve(indices.size() + 1);
      idx.push_back(i);
      idx.insert(idx.end(), indices.begin(), indices.end());
      out.add(std::move(idx), d);
    }
  }
  return out;
}

HorForm wedge(const HorForm& a, const HorForm& b) {
  HorForm out;
  out.degree = a.degree + b.degree;
  for (const auto& [ia, ca] : a.components) {
    for (const auto& [ib, cb] : b.components) {
      std::vector<std::size_t> idx = ia;
      idx.insert(idx.end(), ib.begin(), ib.end());
      out.add(std::move(idx), ca * cb);
    }
  }
  return out;
}

// ---- Cartan forms -------------------------------------------------------------

CartanShadow CartanShadow::omega(std::size_t j, const MultiIndex& sigma) {
  CartanShadow s;
  s.add(VarId::jet(j, sigma), DiffPoly(1));
  return s;
}

CartanShadow CartanShadow::theta(std::size_t a, std::size_t layer) {
  CartanShadow s;
  s.add(VarId::nonlocal(a, layer), DiffPoly(1));
  return s;
}

DiffPoly CartanShadow::coefficient(const VarId& generator) const {
  auto it = coeffs_.find(generator);
  return it == coeffs_.end() ? DiffPoly{} : it->second;
}

DiffPoly CartanShadow::omegaCoefficient(std::size_t j, const MultiIndex& sigma) const {
  return coefficient(VarId::jet(j, sigma));
}

void CartanShadow::add(const VarId& generator, const DiffPoly& c) {
  if (generator.kind != VarKind::Jet && generator.kind != VarKind::Nonlocal)
    throw Error("Cartan forms are generated by jet and nonlocal variables only");
  if (c.isZero()) return;
  auto [it, inserted] = coeffs_.try_emplace(generator, c);
  if (!inserted) {
    it->second += c;
    if (it->second.isZero()) coeffs_.erase(it);
  }
}

CartanShadow& CartanShadow::operator+=(const CartanShadow& o) {
  for (const auto& [v, c] : o.coeffs_) add(v, c);
  return *this;
}

CartanShadow& CartanShadow::operator-=(const CartanShadow& o) {
  for (const auto& [v, c] : o.coeffs_) add(v, -c);
  return *this;
}

CartanShadow CartanShadow::times(const DiffPoly& p) const {
  return mapCoefficients([&](const DiffPoly& c) { return c * p; });
}

CartanShadow CartanShadow::mapCoefficients(const std::function<DiffPoly(const DiffPoly&)>& fn) const {
  CartanShadow out;
  for (const auto& [v, c] : coeffs_) out.add(v, fn(c));
  return out;
}

std::string CartanShadow::str(const JetContext& ctx) const {
  if (coeffs_.empty()) return "0";
  std::string out;
  for (const auto& [v, c] : coeffs_) {
    const std::string gen = (v.kind == VarKind::Jet ? "omega[" : "theta[") + ctx.name(v) + "]";
    std::string piece;
    if (c == DiffPoly(1))
      piece = gen;
    else if (c == DiffPoly(-1))
      piece = "-" + gen;
    else
      piece = coefficientText(ctx, c) + "*" + gen;
    if (out.empty())
      out = piece;
    else if (piece[0] == '-')
      out += " - " + piece.substr(1);
    else
      out += " + " + piece;
  }
  return out;
}

CartanShadow cartanDifferential(const DiffPoly& p) {
  CartanShadow out;
  for (const auto& v : p.variables())
    if (v.kind == VarKind::Jet || v.kind == VarKind::Nonlocal) out.add(v, p.partial(v));
  return out;
}

CartanShadow formTotal(const JetRegime& regime, std::size_t i, const CartanShadow& form) {
  CartanShadow out;
  for (const auto& [v, c] : form.coefficients()) {
    out.add(v, regime.total(i, c));
    out += cartanDifferential(regime.total(i, DiffPoly::variable(v))).times(c);
  }
  return out;
}

Contraction contract(const JetRegime& regime, std::span<const DiffPoly> phi, const CartanShadow& form) {
  Contraction out;
  for (const auto& [v, c] : form.coefficients()) {
    if (v.kind == VarKind::Nonlocal) {
      out.residue[v.index] += c;
      continue;
    }
    if (v.index >= phi.size()) throw DimensionMismatch("symmetry has too few components for the shadow");
    out.value += c * regime.total(v.sigma, phi[v.index]);
  }
  return out;
}

}  // namespace jetcalc
