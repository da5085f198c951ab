#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace jetcalc {

/// Upper bound on the number of independent variables a context may declare.
inline constexpr std::size_t kMaxIndependents = 6;

/// Symmetric multi-index over the independent variables: counts[i] is the
/// number of differentiations in x_i. Stored densely, so insertion order is
/// never observable.
class MultiIndex {
 public:
  MultiIndex() = default;

  /// Single differentiation in direction i.
  static MultiIndex unit(std::size_t i);
  /// Multi-index from a list of directions, e.g. {0, 0, 1} for xxt.
  static MultiIndex fromDirections(std::initializer_list<std::size_t> dirs);
  static MultiIndex fromCounts(const std::vector<unsigned>& counts);

  unsigned count(std::size_t i) const { return counts_[i]; }
  unsigned order() const;
  bool empty() const { return order() == 0; }

  MultiIndex plus(std::size_t i, unsigned times = 1) const;
  MultiIndex plus(const MultiIndex& other) const;
  /// Componentwise difference; requires other <= *this componentwise.
  MultiIndex minus(const MultiIndex& other) const;
  bool contains(const MultiIndex& other) const;
  /// Same multi-index with direction i removed entirely.
  MultiIndex without(std::size_t i) const;

  /// Directions in ascending index order with repetition.
  std::vector<std::size_t> directions() const;

  /// All sub-multi-indices rho <= *this.
  std::vector<MultiIndex> subIndices() const;

  /// All multi-indices over directions [0, n) of the given order, in
  /// graded-lex order (earlier directions first).
  static std::vector<MultiIndex> ofOrder(std::size_t n, unsigned order);
  /// All multi-indices over the given directions with order <= maxOrder.
  static std::vector<MultiIndex> upTo(const std::vector<std::size_t>& dirs, unsigned maxOrder);

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  /// Graded order: by |sigma|, then larger counts in earlier directions first.
  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b);

  std::size_t hash() const;

 private:
  std::array<std::uint8_t, kMaxIndependents> counts_{};
};

enum class VarKind : std::uint8_t {
  Base,
  Jet,
  Nonlocal,
  Parameter,
  TestCovector,
  HomotopyScalar,
  Unknown,
};

/// Identity of a polynomial variable. Payload use by kind:
///   Base: index = independent-variable index
///   Jet: index = dependent-variable index, sigma = derivative multi-index
///   Nonlocal: index = nonlocal variable index, layer = covering layer
///   Parameter: index = parameter index
///   TestCovector: index = covector family, sigma = derivative multi-index
///   HomotopyScalar: no payload
///   Unknown: index = unknown coefficient number
struct VarId {
  VarKind kind = VarKind::Base;
  std::uint32_t index = 0;
  std::uint32_t layer = 0;
  MultiIndex sigma{};

  static VarId base(std::size_t i) { return {VarKind::Base, static_cast<std::uint32_t>(i), 0, {}}; }
  static VarId jet(std::size_t j, MultiIndex s = {}) {
    return {VarKind::Jet, static_cast<std::uint32_t>(j), 0, s};
  }
  static VarId nonlocal(std::size_t a, std::size_t layer = 0) {
    return {VarKind::Nonlocal, static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(layer), {}};
  }
  static VarId parameter(std::size_t i) {
    return {VarKind::Parameter, static_cast<std::uint32_t>(i), 0, {}};
  }
  static VarId testCovector(std::size_t k, MultiIndex s = {}) {
    return {VarKind::TestCovector, static_cast<std::uint32_t>(k), 0, s};
  }
  static VarId homotopyScalar() { return {VarKind::HomotopyScalar, 0, 0, {}}; }
  static VarId unknown(std::size_t n) { return {VarKind::Unknown, static_cast<std::uint32_t>(n), 0, {}}; }

  /// Jet or test-covector variable (carries a derivative multi-index).
  bool isJetLike() const { return kind == VarKind::Jet || kind == VarKind::TestCovector; }
  VarId withSigma(MultiIndex s) const {
    VarId v = *this;
    v.sigma = s;
    return v;
  }

  friend bool operator==(const VarId&, const VarId&) = default;
  friend std::strong_ordering operator<=>(const VarId& a, const VarId& b);
};

struct VarIdHash {
  std::size_t operator()(const VarId& v) const;
};

}  // namespace jetcalc
