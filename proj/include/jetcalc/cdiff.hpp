#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jetcalc/diff_poly.hpp"
#include "jetcalc/expr.hpp"
#include "jetcalc/jetspace.hpp"

namespace jetcalc {

/// One matrix entry sum_sigma a_sigma D_sigma (coefficients left of D).
using OpEntry = std::map<MultiIndex, DiffPoly>;

/// Matrix C-differential operator in total derivatives, in normal form.
/// The regime fixes how D is interpreted (free, restricted, covering).
class CDiffOp {
 public:
  CDiffOp(RegimePtr regime, std::size_t rows, std::size_t cols);

  static CDiffOp zero(RegimePtr regime, std::size_t rows, std::size_t cols) {
    return CDiffOp(std::move(regime), rows, cols);
  }
  static CDiffOp identity(RegimePtr regime, std::size_t size);
  /// Scalar multiplication operator p.
  static CDiffOp multiplication(RegimePtr regime, const DiffPoly& p);
  /// Scalar D_sigma.
  static CDiffOp derivative(RegimePtr regime, const MultiIndex& sigma);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const RegimePtr& regime() const noexcept { return regime_; }
  const JetContext& context() const { return regime_->context(); }

  const OpEntry& entry(std::size_t r, std::size_t c) const { return entries_.at(r * cols_ + c); }
  void addTerm(std::size_t r, std::size_t c, const MultiIndex& sigma, const DiffPoly& coefficient);
  /// Coefficient of D_sigma in entry (r, c); zero when absent.
  DiffPoly coefficient(std::size_t r, std::size_t c, const MultiIndex& sigma) const;

  unsigned order() const;
  bool isZero() const;
  bool isScalar() const { return rows_ == 1 && cols_ == 1; }

  CDiffOp operator-() const { return scaled(Rational(-1)); }
  CDiffOp scaled(const Rational& c) const;
  CDiffOp& operator+=(const CDiffOp& o);
  CDiffOp& operator-=(const CDiffOp& o) { return *this += -o; }
  friend CDiffOp operator+(CDiffOp a, const CDiffOp& b) { return a += b; }
  friend CDiffOp operator-(CDiffOp a, const CDiffOp& b) { return a -= b; }
  friend bool operator==(const CDiffOp& a, const CDiffOp& b);

  /// Applies fn to every coefficient.
  CDiffOp mapCoefficients(const std::function<DiffPoly(const DiffPoly&)>& fn) const;

  /// "D_x^3 + (2*u/3)*D_x + u_x/3"; matrices as "[[a, b], [c, d]]".
  std::string str() const;

 private:
  RegimePtr regime_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<OpEntry> entries_;
};

/// Componentwise sum_sigma a_sigma D_sigma(v).
std::vector<DiffPoly> applyOp(const CDiffOp& op, std::span<const DiffPoly> v);
DiffPoly applyScalar(const CDiffOp& op, const DiffPoly& v);

/// outer o inner, Leibniz-normalized.
CDiffOp composeOps(const CDiffOp& outer, const CDiffOp& inner);

/// Formal adjoint: scalar sum (-1)^|sigma| D_sigma o a_sigma, matrices transposed.
CDiffOp adjoint(const CDiffOp& op);

/// Universal linearization of F on free jets: entry (b, a) = sum dF^b/du^a_sigma D_sigma.
CDiffOp linearization(const GeneralSystem& sys);
/// Restricted linearization of u_t = f: D_t - sum df/du_sigma D_sigma.
CDiffOp linearization(const EvolutionPtr& sys);
/// Linearization of a vector function psi in the given regime (rows = psi.size(), cols = m).
CDiffOp linearizationOf(const RegimePtr& regime, std::span<const DiffPoly> psi);
/// Linearization of the right-hand side only: sum df/du_sigma D_sigma.
CDiffOp rhsLinearization(const EvolutionPtr& sys);

/// Evolutionary derivation E_phi(p) = sum D_sigma(phi^j) dp/du^j_sigma.
/// nonlocalComponents[a], when given, is the component along w^a.
DiffPoly evolutionaryField(const JetRegime& regime, std::span<const DiffPoly> phi, const DiffPoly& p,
                           std::span<const DiffPoly> nonlocalComponents = {});

/// {phi, psi}^j = E_phi(psi^j) - E_psi(phi^j).
std::vector<DiffPoly> jacobiBracket(const JetRegime& regime, std::span<const DiffPoly> phi,
                                    std::span<const DiffPoly> psi);

/// Horizontal q-form: components on strictly increasing index tuples.
struct HorForm {
  unsigned degree = 0;
  std::map<std::vector<std::size_t>, DiffPoly> components;

  static HorForm function(const DiffPoly& p);
  void add(std::vector<std::size_t> indices, const DiffPoly& coefficient);
  bool isZero() const { return components.empty(); }
  friend bool operator==(const HorForm&, const HorForm&) = default;
};

/// Horizontal de Rham differential using the regime's total derivatives.
HorForm horizontalDifferential(const JetRegime& regime, const HorForm& form);
HorForm wedge(const HorForm& a, const HorForm& b);

/// Cartan 1-form sum_v c_v d_C(v) over generators v (jet variables give
/// omega^j_sigma, nonlocal variables give theta^a).
class CartanShadow {
 public:
  CartanShadow() = default;

  /// Identity shadow omega^j_0.
  static CartanShadow omega(std::size_t j, const MultiIndex& sigma = {});
  static CartanShadow theta(std::size_t a, std::size_t layer = 0);

  const std::map<VarId, DiffPoly>& coefficients() const noexcept { return coeffs_; }
  DiffPoly coefficient(const VarId& generator) const;
  /// Coefficient of omega^j_sigma.
  DiffPoly omegaCoefficient(std::size_t j, const MultiIndex& sigma) const;
  void add(const VarId& generator, const DiffPoly& c);
  bool isZero() const { return coeffs_.empty(); }

  CartanShadow& operator+=(const CartanShadow& o);
  CartanShadow& operator-=(const CartanShadow& o);
  friend CartanShadow operator+(CartanShadow a, const CartanShadow& b) { return a += b; }
  friend CartanShadow operator-(CartanShadow a, const CartanShadow& b) { return a -= b; }
  /// Module structure: multiplication by a function.
  CartanShadow times(const DiffPoly& p) const;
  CartanShadow mapCoefficients(const std::function<DiffPoly(const DiffPoly&)>& fn) const;
  friend bool operator==(const CartanShadow&, const CartanShadow&) = default;

  /// e.g. "omega[u_x] + u/2*omega[u] + u_x/2*theta[w]".
  std::string str(const JetContext& ctx) const;

 private:
  std::map<VarId, DiffPoly> coeffs_;
};

/// d_C p = sum dp/du^j_sigma omega^j_sigma + sum dp/dw^a theta^a.
CartanShadow cartanDifferential(const DiffPoly& p);

/// Lie derivative of a Cartan form along D_i: coefficients are
/// differentiated and D_i(d_C v) = d_C(D_i v).
CartanShadow formTotal(const JetRegime& regime, std::size_t i, const CartanShadow& form);

struct Contraction {
  DiffPoly value;
  /// theta^a tokens left unresolved: nonlocal index -> coefficient.
  std::map<std::size_t, DiffPoly> residue;
};

/// Contracts the symmetry phi into the form: omega^j_sigma -> D_sigma(phi^j).
Contraction contract(const JetRegime& regime, std::span<const DiffPoly> phi, const CartanShadow& form);

/// Evaluates an operator expression (polynomials act by multiplication,
/// D_sigma by total differentiation, '*' composes).
CDiffOp evaluateOperator(const ExprNode& node, const RegimePtr& regime);
/// Scalar expression or matrix "[[a, b], [c, d]]".
CDiffOp parseOperator(std::string_view text, const RegimePtr& regime);

}  // namespace jetcalc
