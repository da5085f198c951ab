#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "jetcalc/cdiff.hpp"
#include "jetcalc/errors.hpp"
#include "jetcalc/jetspace.hpp"
#include "jetcalc/variational.hpp"

namespace jetcalc {

/// Extended total derivatives fail to commute; carries the commutator residue.
class NotFlat : public Error {
 public:
  NotFlat(const std::string& what, DiffPoly residue) : Error(what), residue_(std::move(residue)) {}
  const DiffPoly& residue() const noexcept { return residue_; }

 private:
  DiffPoly residue_;
};

/// A nonlocal term cannot be integrated inside the present covering.
class NonlocalObstruction : public Error {
 public:
  NonlocalObstruction(const std::string& what, DiffPoly integrand)
      : Error(what), integrand_(std::move(integrand)) {}
  const DiffPoly& integrand() const noexcept { return integrand_; }

 private:
  DiffPoly integrand_;
};

/// Nonlocal variable w with D~_i w = derivatives[i], one entry per
/// independent variable in declaration order.
struct CoveringLayer {
  std::string name;
  std::vector<DiffPoly> derivatives;
};

/// Base context extended by the named nonlocal variables, w^a on layer a.
JetContext coveringContext(const JetContext& base, const std::vector<std::string>& names);

/// Covering over an evolution system. Layer a may use internal coordinates
/// and the nonlocal variables of earlier layers; flatness is checked eagerly.
class Covering final : public JetRegime {
 public:
  Covering(EvolutionPtr base, std::vector<CoveringLayer> layers);
  static std::shared_ptr<const Covering> make(EvolutionPtr base, std::vector<CoveringLayer> layers) {
    return std::make_shared<const Covering>(std::move(base), std::move(layers));
  }

  const JetContext& context() const override { return ctx_; }
  const EvolutionPtr& base() const noexcept { return base_; }
  const std::vector<CoveringLayer>& layers() const noexcept { return layers_; }
  const DiffPoly& expression(std::size_t a, std::size_t i) const { return layers_.at(a).derivatives.at(i); }

  DiffPoly total(std::size_t i, const DiffPoly& p) const override;
  using JetRegime::total;
  bool sameAs(const JetRegime& other) const override { return this == &other; }
  const char* kind() const override { return "covering"; }

 private:
  EvolutionPtr base_;
  std::vector<CoveringLayer> layers_;
  JetContext ctx_;
};

using CoveringPtr = std::shared_ptr<const Covering>;

/// D~_i p after checking that every variable of p belongs to the covering.
DiffPoly extendedDerivative(const Covering& cov, std::size_t i, const DiffPoly& p);

/// Evolution system underlying an evolution or covering regime.
const EvolutionSystem& underlyingSystem(const JetRegime& regime);

/// Same operator with total derivatives read in another regime.
CDiffOp withRegime(const CDiffOp& op, RegimePtr regime);

/// D~_t(phi) - l_f(phi) with the regime's total derivatives.
std::vector<DiffPoly> symmetryResidual(const RegimePtr& regime, std::span<const DiffPoly> phi);

/// The same operator acting on Cartan-form-valued vectors (shadow equation).
std::vector<CartanShadow> shadowResidual(const RegimePtr& regime, std::span<const CartanShadow> omega);

/// Contracts the shadow with phi and resolves each theta^a as an antiderivative
/// of E_phi(X_x^a) inside the covering. The result is verified to be a
/// (possibly nonlocal) symmetry.
std::vector<DiffPoly> applyShadow(const RegimePtr& regime, std::span<const CartanShadow> shadow,
                                  std::span<const DiffPoly> phi);

bool isSkewAdjoint(const CDiffOp& a);

/// Density sum_cyclic <l_{A, q}(A p), r> over fresh test covectors p, q, r,
/// together with the context it lives in.
struct JacobiDensity {
  JetContext context;
  DiffPoly density;
};
JacobiDensity jacobiDensity(const CDiffOp& a);

/// Hamiltonian test: A skew-adjoint (else PreconditionFailed) and the Jacobi
/// density a total divergence.
bool jacobiCheck(const CDiffOp& a);

/// u_t = A(E(H)). A context without a time variable is extended by "t".
EvolutionPtr hamiltonianFlow(const CDiffOp& a, const Density& h);

struct PoissonBracket {
  DiffPoly density;
  std::vector<DiffPoly> eulerImage;
  bool vanishes() const;
};
/// density = sum_j A(E(H1))^j E(H2)^j.
PoissonBracket poissonBracket(const CDiffOp& a, const Density& h1, const Density& h2);

/// A(psi), verified to be a symmetry of sys.
std::vector<DiffPoly> gfToSymmetry(const CDiffOp& a, const EvolutionPtr& sys, std::span<const DiffPoly> psi);

}  // namespace jetcalc
