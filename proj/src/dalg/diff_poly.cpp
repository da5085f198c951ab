#include "jetcalc/diff_poly.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "jetcalc/context.hpp"
#include "jetcalc/errors.hpp"

namespace jetcalc {

// ---- Monomial ---------------------------------------------------------------

Monomial Monomial::of(const VarId& v, unsigned exponent) {
  Monomial m;
  if (exponent > 0) {
    m.factors_.emplace_back(v, exponent);
    m.degree_ = exponent;
  }
  return m;
}

Monomial Monomial::fromFactors(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(),
            [](const Factor& a, const Factor& b) { return a.first < b.first; });
  Monomial m;
  for (auto& [v, e] : factors) {
    if (e == 0) continue;
    if (!m.factors_.empty() && m.factors_.back().first == v)
      m.factors_.back().second += e;
    else
      m.factors_.emplace_back(v, e);
    m.degree_ += e;
  }
  return m;
}

unsigned Monomial::exponent(const VarId& v) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), v,
                             [](const Factor& f, const VarId& x) { return f.first < x; });
  return (it != factors_.end() && it->first == v) ? it->second : 0;
}

Monomial Monomial::times(const Monomial& other) const {
  Monomial m;
  m.factors_.reserve(factors_.size() + other.factors_.size());
  auto a = factors_.begin();
  auto b = other.factors_.begin();
  while (a != factors_.end() || b != other.factors_.end()) {
    if (b == other.factors_.end() || (a != factors_.end() && a->first < b->first)) {
      m.factors_.push_back(*a++);
    } else if (a == factors_.end() || b->first < a->first) {
      m.factors_.push_back(*b++);
    } else {
      m.factors_.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  m.degree_ = degree_ + other.degree_;
  return m;
}

Monomial Monomial::withExponent(const VarId& v, unsigned exponent) const {
  Monomial m;
  m.factors_.reserve(factors_.size() + 1);
  bool placed = false;
  for (const auto& f : factors_) {
    if (!placed && v < f.first) {
      if (exponent > 0) m.factors_.emplace_back(v, exponent);
      placed = true;
    }
    if (f.first == v) {
      if (exponent > 0) m.factors_.emplace_back(v, exponent);
      placed = true;
      continue;
    }
    m.factors_.push_back(f);
  }
  if (!placed && exponent > 0) m.factors_.emplace_back(v, exponent);
  for (const auto& f : m.factors_) m.degree_ += f.second;
  return m;
}

std::pair<Monomial, Monomial> Monomial::split(const std::function<bool(const VarId&)>& pred) const {
  std::pair<Monomial, Monomial> out;
  for (const auto& f : factors_) {
    Monomial& target = pred(f.first) ? out.first : out.second;
    target.factors_.push_back(f);
    target.degree_ += f.second;
  }
  return out;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  if (auto c = a.degree_ <=> b.degree_; c != 0) return c;
  const std::size_t n = std::min(a.factors_.size(), b.factors_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = a.factors_[i].first <=> b.factors_[i].first; c != 0) return c;
    if (auto c = a.factors_[i].second <=> b.factors_[i].second; c != 0) return c;
  }
  return a.factors_.size() <=> b.factors_.size();
}

// ---- DiffPoly ---------------------------------------------------------------

DiffPoly::DiffPoly(const Rational& c) {
  if (!c.isZero()) terms_.emplace(Monomial{}, c);
}

DiffPoly DiffPoly::variable(const VarId& v) { return term(Rational(1), Monomial::of(v)); }

DiffPoly DiffPoly::term(const Rational& c, const Monomial& m) {
  DiffPoly p;
  if (!c.isZero()) p.terms_.emplace(m, c);
  return p;
}

bool DiffPoly::isConstant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational DiffPoly::constantTerm() const { return coefficient(Monomial{}); }

Rational DiffPoly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void DiffPoly::addTerm(const Rational& c, const Monomial& m) {
  if (c.isZero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.isZero()) terms_.erase(it);
  }
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& o) {
  for (const auto& [m, c] : o.terms_) addTerm(c, m);
  return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& o) {
  for (const auto& [m, c] : o.terms_) addTerm(-c, m);
  return *this;
}

DiffPoly DiffPoly::operator-() const {
  DiffPoly r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
  DiffPoly r;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) r.addTerm(ca * cb, ma.times(mb));
  return r;
}

DiffPoly DiffPoly::scaled(const Rational& c) const {
  if (c.isZero()) return {};
  DiffPoly r = *this;
  for (auto& [m, v] : r.terms_) v *= c;
  return r;
}

DiffPoly DiffPoly::pow(unsigned exponent) const {
  DiffPoly result(1);
  DiffPoly base = *this;
  while (exponent > 0) {
    if (exponent & 1u) result = result * base;
    exponent >>= 1u;
    if (exponent > 0) base = base * base;
  }
  return result;
}

std::set<VarId> DiffPoly::variables() const {
  std::set<VarId> out;
  for (const auto& [m, c] : terms_)
    for (const auto& f : m.factors()) out.insert(f.first);
  return out;
}

bool DiffPoly::contains(const VarId& v) const {
  for (const auto& [m, c] : terms_)
    if (m.exponent(v) > 0) return true;
  return false;
}

bool DiffPoly::containsAny(const std::function<bool(const VarId&)>& pred) const {
  for (const auto& [m, c] : terms_)
    for (const auto& f : m.factors())
      if (pred(f.first)) return true;
  return false;
}

unsigned DiffPoly::degreeIn(const VarId& v) const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.exponent(v));
  return d;
}

unsigned DiffPoly::degreeIn(const std::function<bool(const VarId&)>& pred) const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) {
    unsigned local = 0;
    for (const auto& f : m.factors())
      if (pred(f.first)) local += f.second;
    d = std::max(d, local);
  }
  return d;
}

unsigned DiffPoly::totalDegree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

DiffPoly DiffPoly::partial(const VarId& v) const {
  DiffPoly r;
  for (const auto& [m, c] : terms_) {
    unsigned e = m.exponent(v);
    if (e == 0) continue;
    r.addTerm(c * Rational(static_cast<long>(e)), m.withExponent(v, e - 1));
  }
  return r;
}

DiffPoly DiffPoly::derive(const std::function<std::optional<DiffPoly>(const VarId&)>& image) const {
  std::map<VarId, std::optional<DiffPoly>> cache;
  auto imageOf = [&](const VarId& v) -> const std::optional<DiffPoly>& {
    auto it = cache.find(v);
    if (it == cache.end()) it = cache.emplace(v, image(v)).first;
    return it->second;
  };
  DiffPoly r;
  for (const auto& [m, c] : terms_) {
    for (const auto& [v, e] : m.factors()) {
      const auto& img = imageOf(v);
      if (!img || img->isZero()) continue;
      const Monomial rest = m.withExponent(v, e - 1);
      const Rational k = c * Rational(static_cast<long>(e));
      for (const auto& [mi, ci] : img->terms_) r.addTerm(k * ci, rest.times(mi));
    }
  }
  return r;
}

DiffPoly DiffPoly::substitute(const std::map<VarId, DiffPoly>& bindings) const {
  return substitute([&](const VarId& v) -> std::optional<DiffPoly> {
    auto it = bindings.find(v);
    if (it == bindings.end()) return std::nullopt;
    return it->second;
  });
}

DiffPoly DiffPoly::substitute(const std::function<std::optional<DiffPoly>(const VarId&)>& rule) const {
  std::map<VarId, std::optional<DiffPoly>> images;
  std::map<std::pair<VarId, unsigned>, DiffPoly> powers;
  auto powerOf = [&](const VarId& v, unsigned e) -> const DiffPoly& {
    auto key = std::make_pair(v, e);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    return powers.emplace(key, images.at(v)->pow(e)).first->second;
  };
  DiffPoly r;
  for (const auto& [m, c] : terms_) {
    Monomial kept;
    DiffPoly product(c);
    for (const auto& [v, e] : m.factors()) {
      auto it = images.find(v);
      if (it == images.end()) it = images.emplace(v, rule(v)).first;
      if (it->second)
        product = product * powerOf(v, e);
      else
        kept = kept.times(Monomial::of(v, e));
      if (product.isZero()) break;
    }
    for (const auto& [mi, ci] : product.terms_) r.addTerm(ci, mi.times(kept));
  }
  return r;
}

DiffPoly DiffPoly::substituteToFixpoint(const std::map<VarId, DiffPoly>& bindings) const {
  auto bound = [&](const VarId& v) { return bindings.count(v) > 0; };
  DiffPoly current = *this;
  for (std::size_t pass = 0; pass <= bindings.size() + 1; ++pass) {
    if (!current.containsAny(bound)) return current;
    current = current.substitute(bindings);
  }
  if (!current.containsAny(bound)) return current;
  throw CyclicSubstitution("substitution does not terminate: a bound variable reappears in its own image");
}

DiffPoly DiffPoly::integrateScalar01() const {
  const VarId s = VarId::homotopyScalar();
  DiffPoly r;
  for (const auto& [m, c] : terms_) {
    unsigned e = m.exponent(s);
    r.addTerm(c / Rational(static_cast<long>(e) + 1), m.withExponent(s, 0));
  }
  return r;
}

std::map<Monomial, DiffPoly> DiffPoly::collect(const std::function<bool(const VarId&)>& pred) const {
  std::map<Monomial, DiffPoly> out;
  for (const auto& [m, c] : terms_) {
    auto [key, rest] = m.split(pred);
    out[key].addTerm(c, rest);
  }
  return out;
}

std::string DiffPoly::str(const JetContext& ctx) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const Monomial& m = it->first;
    const Rational& c = it->second;
    const bool negative = c.sign() < 0;
    if (first)
      os << (negative ? "-" : "");
    else
      os << (negative ? " - " : " + ");
    first = false;
    const Rational a = c.abs();
    const mpz_class num = a.numerator();
    const mpz_class den = a.denominator();
    std::string body;
    for (const auto& [v, e] : m.factors()) {
      if (!body.empty()) body += "*";
      body += ctx.name(v);
      if (e > 1) body += "^" + std::to_string(e);
    }
    if (body.empty()) {
      os << a.str();
      continue;
    }
    if (num != 1) os << num.get_str() << "*";
    os << body;
    if (den != 1) os << "/" << den.get_str();
  }
  return os.str();
}

std::string coefficientText(const JetContext& ctx, const DiffPoly& p) {
  if (p.size() == 1 && p.terms().begin()->second.isInteger()) return p.str(ctx);
  return "(" + p.str(ctx) + ")";
}

}  // namespace jetcalc
