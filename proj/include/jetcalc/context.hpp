#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jetcalc/var.hpp"

namespace jetcalc {

struct NonlocalDecl {
  std::string name;
  std::size_t layer = 0;
  friend bool operator==(const NonlocalDecl&, const NonlocalDecl&) = default;
};

/// Variable-declaration context of a jet space: names of the independent
/// variables (optionally one designated as time, always last), dependent
/// variables, parameters, nonlocal variables and test covectors.
class JetContext {
 public:
  JetContext(std::vector<std::string> independents, std::vector<std::string> dependents,
             std::optional<std::size_t> time = std::nullopt,
             std::vector<std::string> parameters = {});

  std::size_t independentCount() const noexcept { return independents_.size(); }
  std::size_t dependentCount() const noexcept { return dependents_.size(); }
  const std::vector<std::string>& independents() const noexcept { return independents_; }
  const std::vector<std::string>& dependents() const noexcept { return dependents_; }
  const std::vector<std::string>& parameters() const noexcept { return parameters_; }
  const std::vector<NonlocalDecl>& nonlocals() const noexcept { return nonlocals_; }
  const std::vector<std::string>& testCovectors() const noexcept { return testCovectors_; }
  std::optional<std::size_t> time() const noexcept { return time_; }
  /// Independent-variable indices other than time, ascending.
  std::vector<std::size_t> spatial() const;

  JetContext withNonlocals(std::vector<NonlocalDecl> nonlocals) const;
  JetContext withTestCovectors(std::vector<std::string> names) const;
  JetContext withParameters(std::vector<std::string> names) const;

  /// Printable name, e.g. "u_{xx}", "w", "alpha", "c3".
  std::string name(const VarId& v) const;
  /// Subscript text for a multi-index: "" , "x", "{xt}".
  std::string subscript(const MultiIndex& sigma) const;

  /// Resolves a bare identifier (no subscript) to its variable. Jet-like
  /// results carry an empty multi-index.
  std::optional<VarId> resolve(std::string_view identifier) const;
  /// Parses subscript letters ("xxt") into a multi-index.
  std::optional<MultiIndex> parseSubscript(std::string_view letters) const;
  std::optional<std::size_t> independentIndex(std::string_view name) const;

  /// Reserved spelling of unknown coefficients ("c" + number) and the
  /// homotopy scalar ("s"), used unless shadowed by a declared name.
  static constexpr std::string_view kUnknownPrefix = "c";
  static constexpr std::string_view kHomotopyName = "s";

  friend bool operator==(const JetContext&, const JetContext&) = default;

 private:
  void validate() const;

  std::vector<std::string> independents_;
  std::vector<std::string> dependents_;
  std::optional<std::size_t> time_;
  std::vector<std::string> parameters_;
  std::vector<NonlocalDecl> nonlocals_;
  std::vector<std::string> testCovectors_;
};

bool isIdentifier(std::string_view s);

}  // namespace jetcalc
