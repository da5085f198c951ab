#include <algorithm>
#include <numeric>

#include "jetcalc/detsolve.hpp"

namespace jetcalc {

namespace {

void enumerate(const std::vector<VarId>& vars, unsigned maxDeg, std::size_t from, Monomial current,
               std::vector<Monomial>& out) {
  out.push_back(current);
  if (current.degree() == maxDeg) return;
  for (std::size_t k = from; k < vars.size(); ++k) enumerate(vars, maxDeg, k, current.times(Monomial::of(vars[k])), out);
}

std::vector<Monomial> monomialsUpTo(const std::vector<VarId>& vars, unsigned maxDeg) {
  std::vector<Monomial> out;
  enumerate(vars, maxDeg, 0, Monomial{}, out);
  return out;
}

}  // namespace

std::vector<Monomial> buildAnsatz(const JetContext& ctx, const Ansatz& a) {
  std::vector<VarId> jets;
  for (std::size_t j = 0; j < ctx.dependentCount(); ++j)
    for (const auto& sigma : MultiIndex::upTo(ctx.spatial(), a.jetOrder)) jets.push_back(VarId::jet(j, sigma));
  std::vector<VarId> base;
  for (std::size_t i = 0; i < ctx.independentCount(); ++i) base.push_back(VarId::base(i));
  if (a.includeParameters)
    for (std::size_t i = 0; i < ctx.parameters().size(); ++i) base.push_back(VarId::parameter(i));

  std::vector<Monomial> out;
  for (const auto& mj : monomialsUpTo(jets, a.polyDeg))
    for (const auto& mb : monomialsUpTo(base, a.baseDeg)) out.push_back(mj.times(mb));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Template makeTemplate(const std::vector<Monomial>& monomials, std::size_t firstUnknown) {
  Template t;
  for (std::size_t k = 0; k < monomials.size(); ++k) {
    const VarId c = VarId::unknown(firstUnknown + k);
    t.unknowns.push_back(c);
    t.expr.addTerm(Rational(1), monomials[k].times(Monomial::of(c)));
  }
  return t;
}

LinearSystem matchCoefficients(std::span<const DiffPoly> exprs, const std::vector<VarId>& unknowns) {
  std::map<VarId, std::size_t> column;
  for (std::size_t k = 0; k < unknowns.size(); ++k) column.emplace(unknowns[k], k);
  LinearSystem out{unknowns, {}};
  const auto known = [](const VarId& v) { return v.kind != VarKind::Unknown; };
  for (const auto& e : exprs) {
    for (const auto& [mono, cofactor] : e.collect(known)) {
      std::map<std::size_t, Rational> row;
      for (const auto& [m, c] : cofactor.terms()) {
        if (m.degree() != 1) throw NonlinearInUnknowns("determining equation is not linear homogeneous in the unknowns");
        auto it = column.find(m.factors()[0].first);
        if (it == column.end()) throw NonlinearInUnknowns("equation refers to an undeclared unknown");
        row[it->second] += c;
      }
      std::erase_if(row, [](const auto& kv) { return kv.second.isZero(); });
      if (!row.empty()) out.rows.push_back(std::move(row));
    }
  }
  return out;
}

namespace {

using IntRow = std::map<std::size_t, mpz_class>;

IntRow toIntegers(const std::map<std::size_t, Rational>& row) {
  mpz_class l = 1;
  for (const auto& [k, c] : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.denominator().get_mpz_t());
  IntRow out;
  for (const auto& [k, c] : row) out[k] = c.numerator() * (l / c.denominator());
  return out;
}

void primitive(IntRow& row) {
  mpz_class g = 0;
  for (const auto& [k, c] : row) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  if (g == 0) return;
  if (sgn(row.begin()->second) < 0) g = -g;
  for (auto& [k, c] : row) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
}

// row <- a*row - b*pivot where a = pivot[col], b = row[col]; removes col.
void eliminate(IntRow& row, const IntRow& pivot, std::size_t col) {
  auto it = row.find(col);
  if (it == row.end()) return;
  const mpz_class a = pivot.at(col);
  const mpz_class b = it->second;
  for (auto& [k, c] : row) c *= a;
  for (const auto& [k, c] : pivot) {
    mpz_class& slot = row[k];
    slot -= b * c;
  }
  std::erase_if(row, [](const auto& kv) { return sgn(kv.second) == 0; });
  primitive(row);
}

}  // namespace

SolutionBasis nullspace(const LinearSystem& sys) {
  const std::size_t n = sys.unknowns.size();
  std::map<std::size_t, IntRow> pivots;
  for (const auto& input : sys.rows) {
    for (const auto& [k, c] : input)
      if (k >= n) throw DimensionMismatch("row refers to an unknown outside the system");
    IntRow row = toIntegers(input);
    primitive(row);
    for (const auto& [col, p] : pivots) eliminate(row, p, col);
    if (row.empty()) continue;
    const std::size_t lead = row.begin()->first;
    for (auto& [col, p] : pivots) eliminate(p, row, lead);
    pivots.emplace(lead, std::move(row));
  }

  SolutionBasis out{sys.unknowns, {}};
  for (std::size_t f = 0; f < n; ++f) {
    if (pivots.count(f)) continue;
    std::vector<Rational> v(n);
    v[f] = Rational(1);
    for (const auto& [col, p] : pivots) {
      auto it = p.find(f);
      if (it != p.end()) v[col] = -Rational(it->second, p.at(col));
    }
    out.vectors.push_back(std::move(v));
  }

  // Reduced echelon form of the basis itself.
  auto& vs = out.vectors;
  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < vs.size(); ++col) {
    std::size_t sel = r;
    while (sel < vs.size() && vs[sel][col].isZero()) ++sel;
    if (sel == vs.size()) continue;
    std::swap(vs[r], vs[sel]);
    const Rational inv = Rational(1) / vs[r][col];
    for (auto& x : vs[r]) x *= inv;
    for (std::size_t k = 0; k < vs.size(); ++k) {
      if (k == r || vs[k][col].isZero()) continue;
      const Rational factor = vs[k][col];
      for (std::size_t c = 0; c < n; ++c) vs[k][c] -= factor * vs[r][c];
    }
    ++r;
  }
  return out;
}

std::map<VarId, DiffPoly> bindings(const SolutionBasis& basis, std::size_t k) {
  std::map<VarId, DiffPoly> out;
  for (std::size_t c = 0; c < basis.unknowns.size(); ++c) out.emplace(basis.unknowns[c], DiffPoly(basis.vectors.at(k)[c]));
  return out;
}

}  // namespace jetcalc
