#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "jetcalc/context.hpp"
#include "jetcalc/diff_poly.hpp"

namespace jetcalc {

/// Parsed expression tree. Shared by polynomial and operator evaluation.
///
/// Grammar:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | '+' unary | power
///   power   := atom ('^' integer)?
///   atom    := integer | ident subscript? | 'D_' subscript | '(' expr ')'
///   subscript := '_' letters | '_{' letters '}'
struct ExprNode {
  enum class Kind { Number, Variable, Derivative, Add, Sub, Mul, Div, Neg, Pow };

  Kind kind = Kind::Number;
  Rational number;
  VarId var;
  MultiIndex sigma;
  unsigned exponent = 0;
  std::vector<std::shared_ptr<const ExprNode>> children;
  std::size_t position = 0;

  bool containsDerivative() const;
};

using ExprPtr = std::shared_ptr<const ExprNode>;

ExprPtr parseExpression(std::string_view text, const JetContext& ctx);

/// Evaluates a derivative-free tree to a canonical polynomial.
DiffPoly evaluatePoly(const ExprNode& node);

/// parse + evaluate.
DiffPoly parsePoly(std::string_view text, const JetContext& ctx);

/// Splits "a, (b, c), d" at top-level commas.
std::vector<std::string> splitTopLevel(std::string_view text, char separator = ',');

}  // namespace jetcalc
