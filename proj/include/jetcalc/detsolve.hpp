#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "jetcalc/cdiff.hpp"
#include "jetcalc/diff_poly.hpp"
#include "jetcalc/errors.hpp"
#include "jetcalc/hamrec.hpp"
#include "jetcalc/jetspace.hpp"
#include "jetcalc/rational.hpp"

namespace jetcalc {

/// Polynomial ansatz bounds: jet order, degree in jet variables, degree in
/// base variables (x and t jointly; parameters join them when included).
struct Ansatz {
  unsigned jetOrder = 0;
  unsigned polyDeg = 0;
  unsigned baseDeg = 0;
  bool includeParameters = false;
};

/// Monomials of the ansatz in internal coordinates (spatial jets only),
/// ascending graded-lex order.
std::vector<Monomial> buildAnsatz(const JetContext& ctx, const Ansatz& a);

/// Sum of c_k * monomial_k with fresh unknown coefficients c_first, ...
struct Template {
  DiffPoly expr;
  std::vector<VarId> unknowns;
};
Template makeTemplate(const std::vector<Monomial>& monomials, std::size_t firstUnknown);

struct LinearSystem {
  std::vector<VarId> unknowns;
  std::vector<std::map<std::size_t, Rational>> rows;
};

/// One homogeneous row per known monomial of each expression.
/// Throws NonlinearInUnknowns unless every expression is linear homogeneous
/// in the unknowns.
LinearSystem matchCoefficients(std::span<const DiffPoly> exprs, const std::vector<VarId>& unknowns);

/// Vectors over the unknowns of a linear system; reduced echelon form.
struct SolutionBasis {
  std::vector<VarId> unknowns;
  std::vector<std::vector<Rational>> vectors;
};

/// Exact nullspace by fraction-free elimination, pivots in unknown order.
SolutionBasis nullspace(const LinearSystem& sys);

/// Binds the unknowns of a basis vector and sets the remaining ones to zero.
std::map<VarId, DiffPoly> bindings(const SolutionBasis& basis, std::size_t k);

struct SolveOptions {
  /// Worker count for building the determining equations; output does not depend on it.
  unsigned jobs = 1;
};

template <class T>
struct Solutions {
  std::vector<T> basis;
  std::size_t unknownCount = 0;
  std::size_t equationCount = 0;
};

using Vector = std::vector<DiffPoly>;
using ShadowVector = std::vector<CartanShadow>;

/// Symmetries phi with D_t(phi) = l_f(phi) inside the ansatz.
Solutions<Vector> symmetries(const EvolutionPtr& sys, const Ansatz& a, const SolveOptions& opt = {});

/// Generating functions psi with D_t(psi) + l_f^*(psi) = 0 inside the ansatz.
Solutions<Vector> generatingFunctions(const EvolutionPtr& sys, const Ansatz& a, const SolveOptions& opt = {});

/// Shadows: Cartan 1-form valued solutions of the (extended) linearization.
/// Each component is sum_{|sigma| <= k} P_sigma omega_sigma + sum_a Q_a theta^a
/// with P, Q from the ansatz. cov may be null.
Solutions<ShadowVector> shadows(const EvolutionPtr& sys, const CoveringPtr& cov, const Ansatz& a,
                                const SolveOptions& opt = {});

}  // namespace jetcalc
