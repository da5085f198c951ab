#pragma once

#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "jetcalc/rational.hpp"
#include "jetcalc/var.hpp"

namespace jetcalc {

class JetContext;

/// Power product of variables (the factor part of a monomial), kept sorted by
/// VarId with positive exponents.
class Monomial {
 public:
  using Factor = std::pair<VarId, unsigned>;

  Monomial() = default;
  static Monomial of(const VarId& v, unsigned exponent = 1);
  /// Builds from arbitrary factors; merges duplicates and drops zero exponents.
  static Monomial fromFactors(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  unsigned degree() const noexcept { return degree_; }
  bool empty() const noexcept { return factors_.empty(); }
  unsigned exponent(const VarId& v) const;

  Monomial times(const Monomial& other) const;
  /// Same monomial with v raised to `exponent` (0 removes v).
  Monomial withExponent(const VarId& v, unsigned exponent) const;
  /// Splits into (factors satisfying pred, remaining factors).
  std::pair<Monomial, Monomial> split(const std::function<bool(const VarId&)>& pred) const;

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.factors_ == b.factors_; }
  /// Graded lexicographic: total degree first, then factor lists.
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);

 private:
  std::vector<Factor> factors_;
  unsigned degree_ = 0;
};

/// Differential polynomial with exact rational coefficients, stored in
/// canonical form: distinct monomials, no zero coefficients.
class DiffPoly {
 public:
  using TermMap = std::map<Monomial, Rational>;

  DiffPoly() = default;
  DiffPoly(const Rational& c);  // NOLINT(google-explicit-constructor)
  DiffPoly(long c) : DiffPoly(Rational(c)) {}  // NOLINT(google-explicit-constructor)

  static DiffPoly variable(const VarId& v);
  static DiffPoly term(const Rational& c, const Monomial& m);

  const TermMap& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool isZero() const noexcept { return terms_.empty(); }
  bool isConstant() const;
  /// Coefficient of the empty monomial.
  Rational constantTerm() const;
  Rational coefficient(const Monomial& m) const;

  DiffPoly& operator+=(const DiffPoly& o);
  DiffPoly& operator-=(const DiffPoly& o);
  DiffPoly& operator*=(const DiffPoly& o) { return *this = *this * o; }
  DiffPoly operator-() const;
  friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
  friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
  friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
  friend bool operator==(const DiffPoly& a, const DiffPoly& b) { return a.terms_ == b.terms_; }

  DiffPoly scaled(const Rational& c) const;
  DiffPoly pow(unsigned exponent) const;
  /// Adds c*m in place.
  void addTerm(const Rational& c, const Monomial& m);

  std::set<VarId> variables() const;
  bool contains(const VarId& v) const;
  bool containsAny(const std::function<bool(const VarId&)>& pred) const;
  unsigned degreeIn(const VarId& v) const;
  /// Maximum combined degree in the variables matching pred.
  unsigned degreeIn(const std::function<bool(const VarId&)>& pred) const;
  unsigned totalDegree() const;

  /// Formal partial derivative treating every VarId as independent.
  DiffPoly partial(const VarId& v) const;

  /// Applies the derivation sending each variable v to image(v) (variables
  /// with no image are constants for the derivation).
  DiffPoly derive(const std::function<std::optional<DiffPoly>(const VarId&)>& image) const;

  /// Simultaneous substitution v -> bindings[v], then canonicalization.
  DiffPoly substitute(const std::map<VarId, DiffPoly>& bindings) const;
  /// Substitution under a rule; variables where rule returns nullopt are kept.
  DiffPoly substitute(const std::function<std::optional<DiffPoly>(const VarId&)>& rule) const;

  /// Repeats simultaneous substitution until no bound variable remains.
  /// Throws CyclicSubstitution when that never happens.
  DiffPoly substituteToFixpoint(const std::map<VarId, DiffPoly>& bindings) const;

  /// Definite integral over the homotopy scalar on [0, 1].
  DiffPoly integrateScalar01() const;

  /// Groups terms by their pred-part: result[m] is the cofactor of m.
  std::map<Monomial, DiffPoly> collect(const std::function<bool(const VarId&)>& pred) const;

  /// Canonical text using the names in ctx; reparses to the same polynomial.
  std::string str(const JetContext& ctx) const;

 private:
  TermMap terms_;
};

/// Text of p as a factor: parenthesized unless it is a single monomial with
/// an integer coefficient.
std::string coefficientText(const JetContext& ctx, const DiffPoly& p);

}  // namespace jetcalc
