#include "jetcalc/context.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "jetcalc/errors.hpp"

namespace jetcalc {

bool isIdentifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

JetContext::JetContext(std::vector<std::string> independents, std::vector<std::string> dependents,
                       std::optional<std::size_t> time, std::vector<std::string> parameters)
    : independents_(std::move(independents)),
      dependents_(std::move(dependents)),
      time_(time),
      parameters_(std::move(parameters)) {
  validate();
}

void JetContext::validate() const {
  if (independents_.empty()) throw InvalidContext("at least one independent variable is required");
  if (independents_.size() > kMaxIndependents)
    throw InvalidContext("at most " + std::to_string(kMaxIndependents) + " independent variables are supported");
  if (dependents_.empty()) throw InvalidContext("at least one dependent variable is required");
  if (time_ && *time_ + 1 != independents_.size())
    throw InvalidContext("the time variable must be the last independent variable");
  std::set<std::string> seen;
  auto add = [&](const std::string& n) {
    if (!isIdentifier(n)) throw InvalidContext("invalid identifier '" + n + "'");
    if (n == "D") throw InvalidContext("'D' is reserved for total-derivative operators");
    if (!seen.insert(n).second) throw InvalidContext("duplicate name '" + n + "'");
  };
  for (const auto& n : independents_) add(n);
  for (const auto& n : dependents_) add(n);
  for (const auto& n : parameters_) add(n);
  for (const auto& d : nonlocals_) add(d.name);
  for (const auto& n : testCovectors_) add(n);
}

std::vector<std::size_t> JetContext::spatial() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < independents_.size(); ++i)
    if (!time_ || *time_ != i) out.push_back(i);
  return out;
}

JetContext JetContext::withNonlocals(std::vector<NonlocalDecl> nonlocals) const {
  JetContext c = *this;
  c.nonlocals_ = std::move(nonlocals);
  c.validate();
  return c;
}

JetContext JetContext::withTestCovectors(std::vector<std::string> names) const {
  JetContext c = *this;
  c.testCovectors_ = std::move(names);
  c.validate();
  return c;
}

JetContext JetContext::withParameters(std::vector<std::string> names) const {
  JetContext c = *this;
  c.parameters_ = std::move(names);
  c.validate();
  return c;
}

std::string JetContext::subscript(const MultiIndex& sigma) const {
  if (sigma.empty()) return "";
  std::string letters;
  bool multiChar = false;
  for (auto d : sigma.directions()) {
    const std::string& n = d < independents_.size() ? independents_[d] : "?" + std::to_string(d);
    multiChar = multiChar || n.size() > 1;
    letters += n;
  }
  if (sigma.order() == 1 && !multiChar) return letters;
  return "{" + letters + "}";
}

std::string JetContext::name(const VarId& v) const {
  auto pick = [](const std::vector<std::string>& names, std::size_t i, const char* fallback) {
    return i < names.size() ? names[i] : std::string(fallback) + std::to_string(i);
  };
  switch (v.kind) {
    case VarKind::Base:
      return pick(independents_, v.index, "x");
    case VarKind::Jet: {
      std::string s = pick(dependents_, v.index, "u");
      return v.sigma.empty() ? s : s + "_" + subscript(v.sigma);
    }
    case VarKind::Nonlocal:
      return v.index < nonlocals_.size() ? nonlocals_[v.index].name : "w" + std::to_string(v.index);
    case VarKind::Parameter:
      return pick(parameters_, v.index, "a");
    case VarKind::TestCovector: {
      std::string s = pick(testCovectors_, v.index, "psi");
      return v.sigma.empty() ? s : s + "_" + subscript(v.sigma);
    }
    case VarKind::HomotopyScalar:
      return std::string(kHomotopyName);
    case VarKind::Unknown:
      return std::string(kUnknownPrefix) + std::to_string(v.index);
  }
  return "?";
}

std::optional<std::size_t> JetContext::independentIndex(std::string_view n) const {
  for (std::size_t i = 0; i < independents_.size(); ++i)
    if (independents_[i] == n) return i;
  return std::nullopt;
}

std::optional<VarId> JetContext::resolve(std::string_view id) const {
  for (std::size_t i = 0; i < independents_.size(); ++i)
    if (independents_[i] == id) return VarId::base(i);
  for (std::size_t j = 0; j < dependents_.size(); ++j)
    if (dependents_[j] == id) return VarId::jet(j);
  for (std::size_t i = 0; i < parameters_.size(); ++i)
    if (parameters_[i] == id) return VarId::parameter(i);
  for (std::size_t a = 0; a < nonlocals_.size(); ++a)
    if (nonlocals_[a].name == id) return VarId::nonlocal(a, nonlocals_[a].layer);
  for (std::size_t k = 0; k < testCovectors_.size(); ++k)
    if (testCovectors_[k] == id) return VarId::testCovector(k);
  if (id == kHomotopyName) return VarId::homotopyScalar();
  if (id.size() > kUnknownPrefix.size() && id.substr(0, kUnknownPrefix.size()) == kUnknownPrefix) {
    auto digits = id.substr(kUnknownPrefix.size());
    if (std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) &&
        digits.size() < 9 && (digits.size() == 1 || digits[0] != '0'))
      return VarId::unknown(std::stoul(std::string(digits)));
  }
  return std::nullopt;
}

std::optional<MultiIndex> JetContext::parseSubscript(std::string_view letters) const {
  MultiIndex sigma;
  std::size_t pos = 0;
  if (letters.empty()) return std::nullopt;
  while (pos < letters.size()) {
    // Greedy longest match against the declared independent names.
    std::size_t bestLen = 0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < independents_.size(); ++i) {
      const auto& n = independents_[i];
      if (n.size() > bestLen && letters.substr(pos, n.size()) == n) {
        bestLen = n.size();
        best = i;
      }
    }
    if (bestLen == 0) return std::nullopt;
    sigma = sigma.plus(best);
    pos += bestLen;
  }
  return sigma;
}

}  // namespace jetcalc
