#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "jetcalc/diff_poly.hpp"
#include "jetcalc/errors.hpp"
#include "jetcalc/jetspace.hpp"

namespace jetcalc {

/// Raised when a function is not an exact total derivative; carries the part
/// that could not be integrated.
class NotExactDerivative : public Error {
 public:
  NotExactDerivative(const std::string& what, DiffPoly remainder)
      : Error(what), remainder_(std::move(remainder)) {}
  const DiffPoly& remainder() const noexcept { return remainder_; }

 private:
  DiffPoly remainder_;
};

/// Lagrangian density: coefficient of dx_1 ^ ... ^ dx_n.
struct Density {
  DiffPoly value;
};

/// Conserved current with the time component first, followed by the spatial
/// components in declaration order.
struct ConservedCurrent {
  std::vector<DiffPoly> components;
};

/// Independent-variable index that current component k pairs with.
std::size_t currentDirection(const JetContext& ctx, std::size_t k);

/// Euler operator. Returns one component per dependent variable followed by
/// one per test covector declared in ctx (or occurring in L).
std::vector<DiffPoly> euler(const JetContext& ctx, const DiffPoly& density);
bool isDivergence(const JetContext& ctx, const DiffPoly& density);

/// D_i potential of a nonlocal variable: D_i(nonlocal) = scale * jet.
struct Potential {
  VarId nonlocal;
  VarId jet;
  Rational scale{1};
};

/// h with D_i h = g, built by integrating the top-order jet variable
/// repeatedly. Nonlocal variables listed in `potentials` serve as
/// antiderivatives of their jets. Throws NotExactDerivative otherwise.
DiffPoly dxInverse(const JetContext& ctx, const DiffPoly& g, std::size_t i,
                   std::span<const Potential> potentials = {});

/// True iff the linearization of psi is self-adjoint (psi.size() == m).
bool selfAdjointTest(const JetContext& ctx, std::span<const DiffPoly> psi);

/// Lagrangian L = int_0^1 sum_j u^j psi^j[u_sigma -> s u_sigma] ds with E(L) = psi.
/// Throws NotVariational when psi fails the self-adjointness test.
Density homotopyLagrangian(const JetContext& ctx, std::span<const DiffPoly> psi);

/// sum_k D_k J_k in internal coordinates.
DiffPoly conservationResidual(const EvolutionSystem& sys, const ConservedCurrent& current);
bool verifyConservedCurrent(const EvolutionSystem& sys, const ConservedCurrent& current);

/// D_t psi + l_f^*(psi), componentwise; zero exactly for generating functions.
std::vector<DiffPoly> generatingFunctionResidual(const EvolutionPtr& sys, std::span<const DiffPoly> psi);

/// psi = E(J_t), checked against the generating-function equation.
std::vector<DiffPoly> generatingFunction(const EvolutionPtr& sys, const ConservedCurrent& current);

/// Current with generating function psi for a system with one spatial
/// variable: J_t from the homotopy formula, J_x = D_x^{-1}(-D_t J_t).
ConservedCurrent currentFromGF(const EvolutionPtr& sys, std::span<const DiffPoly> psi);

/// J_k = sum_l D_l(L_kl) for a skew matrix L (indexed like current components).
ConservedCurrent trivialCurrent(const EvolutionSystem& sys, const std::vector<std::vector<DiffPoly>>& skew);

}  // namespace jetcalc
