#include <cctype>
#include <sstream>

#include "jetcalc/cdiff.hpp"
#include "jetcalc/errors.hpp"

namespace jetcalc {

namespace {

/// Memoized D_rho(p) for one polynomial.
class DerivativeTable {
 public:
  DerivativeTable(const JetRegime& regime, DiffPoly p) : regime_(regime) { table_.emplace(MultiIndex{}, std::move(p)); }

  const DiffPoly& get(const MultiIndex& rho) {
    auto it = table_.find(rho);
    if (it != table_.end()) return it->second;
    const auto dirs = rho.directions();
    const std::size_t last = dirs.back();
    DiffPoly lower = get(rho.minus(MultiIndex::unit(last)));
    DiffPoly value = lower.isZero() ? DiffPoly{} : regime_.total(last, lower);
    return table_.emplace(rho, std::move(value)).first->second;
  }

 private:
  const JetRegime& regime_;
  std::map<MultiIndex, DiffPoly> table_;
};

Rational multiBinomial(const MultiIndex& sigma, const MultiIndex& rho) {
  Rational r(1);
  for (std::size_t i = 0; i < kMaxIndependents; ++i)
    if (rho.count(i) > 0) r *= binomial(sigma.count(i), rho.count(i));
  return r;
}

void checkRegime(const JetRegime& regime, std::span<const DiffPoly> v) {
  if (const auto* evo = dynamic_cast<const EvolutionSystem*>(&regime)) {
    for (const auto& p : v)
      if (!evo->isInternal(p))
        throw RegimeMismatch("operator over an evolution system applied to a function outside internal coordinates");
  }
}

std::string derivativeText(const JetContext& ctx, const MultiIndex& sigma) {
  std::string s;
  for (std::size_t i = 0; i < ctx.independentCount(); ++i) {
    const unsigned c = sigma.count(i);
    if (c == 0) continue;
    if (!s.empty()) s += "*";
    s += "D_" + ctx.independents()[i];
    if (c > 1) s += "^" + std::to_string(c);
  }
  return s;
}

std::string entryText(const JetContext& ctx, const OpEntry& e) {
  if (e.empty()) return "0";
  std::string out;
  for (auto it = e.rbegin(); it != e.rend(); ++it) {
    std::string piece;
    const DiffPoly& a = it->second;
    if (it->first.empty()) {
      piece = a.str(ctx);
    } else if (a == DiffPoly(1)) {
      piece = derivativeText(ctx, it->first);
    } else if (a == DiffPoly(-1)) {
      piece = "-" + derivativeText(ctx, it->first);
    } else {
      piece = coefficientText(ctx, a) + "*" + derivativeText(ctx, it->first);
    }
    if (out.empty()) {
      out = piece;
    } else if (piece[0] == '-') {
      out += " - " + piece.substr(1);
    } else {
      out += " + " + piece;
    }
  }
  return out;
}

}  // namespace

CDiffOp::CDiffOp(RegimePtr regime, std::size_t rows, std::size_t cols)
    : regime_(std::move(regime)), rows_(rows), cols_(cols), entries_(rows * cols) {
  if (!regime_) throw Error("operator needs a regime");
}

CDiffOp CDiffOp::identity(RegimePtr regime, std::size_t size) {
  CDiffOp op(std::move(regime), size, size);
  for (std::size_t i = 0; i < size; ++i) op.addTerm(i, i, {}, DiffPoly(1));
  return op;
}

CDiffOp CDiffOp::multiplication(RegimePtr regime, const DiffPoly& p) {
  CDiffOp op(std::move(regime), 1, 1);
  op.addTerm(0, 0, {}, p);
  return op;
}

CDiffOp CDiffOp::derivative(RegimePtr regime, const MultiIndex& sigma) {
  CDiffOp op(std::move(regime), 1, 1);
  op.addTerm(0, 0, sigma, DiffPoly(1));
  return op;
}

void CDiffOp::addTerm(std::size_t r, std::size_t c, const MultiIndex& sigma, const DiffPoly& coefficient) {
  if (coefficient.isZero()) return;
  OpEntry& e = entries_.at(r * cols_ + c);
  auto [it, inserted] = e.try_emplace(sigma, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second.isZero()) e.erase(it);
  }
}

DiffPoly CDiffOp::coefficient(std::size_t r, std::size_t c, const MultiIndex& sigma) const {
  const auto& e = entry(r, c);
  auto it = e.find(sigma);
  return it == e.end() ? DiffPoly{} : it->second;
}

unsigned CDiffOp::order() const {
  unsigned k = 0;
  for (const auto& e : entries_)
    for (const auto& [sigma, a] : e) k = std::max(k, sigma.order());
  return k;
}

bool CDiffOp::isZero() const {
  for (const auto& e : entries_)
    if (!e.empty()) return false;
  return true;
}

CDiffOp CDiffOp::scaled(const Rational& c) const {
  return mapCoefficients([&](const DiffPoly& a) { return a.scaled(c); });
}

CDiffOp CDiffOp::mapCoefficients(const std::function<DiffPoly(const DiffPoly&)>& fn) const {
  CDiffOp out(regime_, rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      for (const auto& [sigma, a] : entry(r, c)) out.addTerm(r, c, sigma, fn(a));
  return out;
}

CDiffOp& CDiffOp::operator+=(const CDiffOp& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw DimensionMismatch("operator sum with different shapes");
  if (!regime_->sameAs(*o.regime_)) throw RegimeMismatch("operator sum across different regimes");
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      for (const auto& [sigma, a] : o.entry(r, c)) addTerm(r, c, sigma, a);
  return *this;
}

bool operator==(const CDiffOp& a, const CDiffOp& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_ && a.regime_->sameAs(*b.regime_);
}

std::string CDiffOp::str() const {
  const JetContext& ctx = context();
  if (isScalar()) return entryText(ctx, entry(0, 0));
  std::ostringstream os;
  os << "[";
  for (std::size_t r = 0; r < rows_; ++r) {
    os << (r ? ", [" : "[");
    for (std::size_t c = 0; c < cols_; ++c) os << (c ? ", " : "") << entryText(ctx, entry(r, c));
    os << "]";
  }
  os << "]";
  return os.str();
}

std::vector<DiffPoly> applyOp(const CDiffOp& op, std::span<const DiffPoly> v) {
  if (v.size() != op.cols())
    throw DimensionMismatch("operator with " + std::to_string(op.cols()) + " columns applied to a vector of size " +
                            std::to_string(v.size()));
  const JetRegime& regime = *op.regime();
  checkRegime(regime, v);
  std::vector<DerivativeTable> tables;
  tables.reserve(v.size());
  for (const auto& p : v) tables.emplace_back(regime, p);
  std::vector<DiffPoly> out(op.rows());
  for (std::size_t r = 0; r < op.rows(); ++r)
    for (std::size_t c = 0; c < op.cols(); ++c)
      for (const auto& [sigma, a] : op.entry(r, c)) out[r] += a * tables[c].get(sigma);
  return out;
}

DiffPoly applyScalar(const CDiffOp& op, const DiffPoly& v) {
  std::vector<DiffPoly> in{v};
  return applyOp(op, in).at(0);
}

CDiffOp composeOps(const CDiffOp& outer, const CDiffOp& inner) {
  if (outer.cols() != inner.rows()) throw DimensionMismatch("composition of incompatible operator shapes");
  if (!outer.regime()->sameAs(*inner.regime())) throw RegimeMismatch("composition across different regimes");
  const JetRegime& regime = *outer.regime();
  CDiffOp out(outer.regime(), outer.rows(), inner.cols());
  for (std::size_t k = 0; k < outer.cols(); ++k) {
    for (std::size_t c = 0; c < inner.cols(); ++c) {
      const OpEntry& b = inner.entry(k, c);
      if (b.empty()) continue;
      std::map<MultiIndex, DerivativeTable> tables;
      for (const auto& [tau, coef] : b) tables.emplace(tau, DerivativeTable(regime, coef));
      for (std::size_t r = 0; r < outer.rows(); ++r) {
        for (const auto& [sigma, a] : outer.entry(r, k)) {
          for (const auto& rho : sigma.subIndices()) {
            const Rational binom = multiBinomial(sigma, rho);
            const MultiIndex rest = sigma.minus(rho);
            for (const auto& [tau, coef] : b) {
              const DiffPoly& d = tables.at(tau).get(rho);
              if (d.isZero()) continue;
              out.addTerm(r, c, rest.plus(tau), (a * d).scaled(binom));
            }
          }
        }
      }
    }
  }
  return out;
}

CDiffOp adjoint(const CDiffOp& op) {
  const JetRegime& regime = *op.regime();
  CDiffOp out(op.regime(), op.cols(), op.rows());
  for (std::size_t r = 0; r < op.rows(); ++r) {
    for (std::size_t c = 0; c < op.cols(); ++c) {
      for (const auto& [sigma, a] : op.entry(r, c)) {
        DerivativeTable table(regime, a);
        const Rational sign = (sigma.order() % 2 == 0) ? Rational(1) : Rational(-1);
        for (const auto& rho : sigma.subIndices()) {
          const DiffPoly& d = table.get(rho);
          if (d.isZero()) continue;
          out.addTerm(c, r, sigma.minus(rho), d.scaled(sign * multiBinomial(sigma, rho)));
        }
      }
    }
  }
  return out;
}

namespace {

void addLinearizationRow(CDiffOp& op, std::size_t row, const DiffPoly& f) {
  for (const auto& v : f.variables()) {
    if (v.kind != VarKind::Jet) continue;
    op.addTerm(row, v.index, v.sigma, f.partial(v));
  }
}

}  // namespace

CDiffOp linearization(const GeneralSystem& sys) {
  CDiffOp op(FreeJets::make(sys.ctx), sys.equations.size(), sys.ctx.dependentCount());
  for (std::size_t b = 0; b < sys.equations.size(); ++b) addLinearizationRow(op, b, sys.equations[b]);
  return op;
}

CDiffOp rhsLinearization(const EvolutionPtr& sys) {
  const std::size_t m = sys->context().dependentCount();
  CDiffOp op(sys, m, m);
  for (std::size_t b = 0; b < m; ++b) addLinearizationRow(op, b, sys->rhs()[b]);
  return op;
}

CDiffOp linearization(const EvolutionPtr& sys) {
  const std::size_t m = sys->context().dependentCount();
  CDiffOp op(sys, m, m);
  for (std::size_t b = 0; b < m; ++b) op.addTerm(b, b, MultiIndex::unit(sys->timeIndex()), DiffPoly(1));
  return op - rhsLinearization(sys);
}

CDiffOp linearizationOf(const RegimePtr& regime, std::span<const DiffPoly> psi) {
  CDiffOp op(regime, psi.size(), regime->context().dependentCount());
  for (std::size_t b = 0; b < psi.size(); ++b) addLinearizationRow(op, b, psi[b]);
  return op;
}

DiffPoly evolutionaryField(const JetRegime& regime, std::span<const DiffPoly> phi, const DiffPoly& p,
                           std::span<const DiffPoly> nonlocalComponents) {
  std::vector<DerivativeTable> tables;
  tables.reserve(phi.size());
  for (const auto& f : phi) tables.emplace_back(regime, f);
  return p.derive([&](const VarId& v) -> std::optional<DiffPoly> {
    if (v.kind == VarKind::Jet) {
      if (v.index >= phi.size()) throw DimensionMismatch("generating function has too few components");
      return tables[v.index].get(v.sigma);
    }
    if (v.kind == VarKind::Nonlocal && v.index < nonlocalComponents.size()) return nonlocalComponents[v.index];
    return std::nullopt;
  });
}

std::vector<DiffPoly> jacobiBracket(const JetRegime& regime, std::span<const DiffPoly> phi,
                                    std::span<const DiffPoly> psi) {
  if (phi.size() != psi.size()) throw DimensionMismatch("bracket of generating functions of different sizes");
  std::vector<DiffPoly> out;
  out.reserve(phi.size());
  for (std::size_t j = 0; j < phi.size(); ++j)
    out.push_back(evolutionaryField(regime, phi, psi[j]) - evolutionaryField(regime, psi, phi[j]));
  return out;
}

// ---- parsing ---------------------------------------------------------------

CDiffOp evaluateOperator(const ExprNode& node, const RegimePtr& regime) {
  using K = ExprNode::Kind;
  if (!node.containsDerivative()) return CDiffOp::multiplication(regime, evaluatePoly(node));
  switch (node.kind) {
    case K::Derivative:
      return CDiffOp::derivative(regime, node.sigma);
    case K::Add:
      return evaluateOperator(*node.children[0], regime) + evaluateOperator(*node.children[1], regime);
    case K::Sub:
      return evaluateOperator(*node.children[0], regime) - evaluateOperator(*node.children[1], regime);
    case K::Neg:
      return -evaluateOperator(*node.children[0], regime);
    case K::Mul:
      return composeOps(evaluateOperator(*node.children[0], regime), evaluateOperator(*node.children[1], regime));
    case K::Div: {
      if (node.children[1]->containsDerivative())
        throw SyntaxError("cannot divide by an operator", node.position);
      DiffPoly d = evaluatePoly(*node.children[1]);
      if (!d.isConstant() || d.isZero())
        throw SyntaxError("division is only allowed by nonzero rational constants", node.position);
      return evaluateOperator(*node.children[0], regime).scaled(Rational(1) / d.constantTerm());
    }
    case K::Pow: {
      CDiffOp base = evaluateOperator(*node.children[0], regime);
      CDiffOp result = CDiffOp::identity(regime, 1);
      for (unsigned k = 0; k < node.exponent; ++k) result = composeOps(result, base);
      return result;
    }
    default:
      break;
  }
  throw SyntaxError("malformed operator expression", node.position);
}

CDiffOp parseOperator(std::string_view text, const RegimePtr& regime) {
  std::string_view t = text;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
  if (t.empty() || t.front() != '[') return evaluateOperator(*parseExpression(t, regime->context()), regime);
  if (t.back() != ']') throw SyntaxError("matrix operator must end with ']'", text.size());
  std::vector<std::vector<std::string>> cells;
  for (auto rowText : splitTopLevel(t.substr(1, t.size() - 2))) {
    std::string_view row = rowText;
    while (!row.empty() && std::isspace(static_cast<unsigned char>(row.front()))) row.remove_prefix(1);
    while (!row.empty() && std::isspace(static_cast<unsigned char>(row.back()))) row.remove_suffix(1);
    if (row.size() < 2 || row.front() != '[' || row.back() != ']')
      throw SyntaxError("matrix rows must be written as [a, b, ...]", 0);
    cells.push_back(splitTopLevel(row.substr(1, row.size() - 2)));
  }
  const std::size_t rows = cells.size();
  const std::size_t cols = cells.front().size();
  CDiffOp out(regime, rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (cells[r].size() != cols) throw DimensionMismatch("ragged matrix operator");
    for (std::size_t c = 0; c < cols; ++c) {
      CDiffOp e = evaluateOperator(*parseExpression(cells[r][c], regime->context()), regime);
      for (const auto& [sigma, a] : e.entry(0, 0)) out.addTerm(r, c, sigma, a);
    }
  }
  return out;
}

}  // namespace jetcalc
