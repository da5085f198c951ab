#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "jetcalc/context.hpp"
#include "jetcalc/diff_poly.hpp"

namespace jetcalc {

/// Free total derivative on J^inf:
///   D_i p = dp/dx_i + sum_{j,sigma} u^j_{sigma i} dp/du^j_sigma.
/// Test covectors are differentiated like jet variables.
/// Throws NonlocalVariablePresent if p contains a nonlocal variable.
DiffPoly totalDerivative(const JetContext& ctx, std::size_t i, const DiffPoly& p);
DiffPoly totalDerivative(const JetContext& ctx, const MultiIndex& sigma, const DiffPoly& p);

/// A coordinate regime that knows how to take total derivatives: free jets,
/// the infinite prolongation of an evolution system (internal coordinates),
/// or a covering over it.
class JetRegime {
 public:
  virtual ~JetRegime() = default;

  virtual const JetContext& context() const = 0;
  virtual DiffPoly total(std::size_t i, const DiffPoly& p) const = 0;
  /// Iterated derivative D_sigma; directions applied in ascending order.
  DiffPoly total(const MultiIndex& sigma, const DiffPoly& p) const;
  /// True when the two regimes interpret total derivatives identically.
  virtual bool sameAs(const JetRegime& other) const = 0;
  /// Human-readable tag ("free", "evolution", "covering").
  virtual const char* kind() const = 0;
};

using RegimePtr = std::shared_ptr<const JetRegime>;

/// Free jets J^inf(pi) with the unrestricted total derivatives.
class FreeJets final : public JetRegime {
 public:
  explicit FreeJets(JetContext ctx) : ctx_(std::move(ctx)) {}
  static RegimePtr make(JetContext ctx) { return std::make_shared<FreeJets>(std::move(ctx)); }

  const JetContext& context() const override { return ctx_; }
  DiffPoly total(std::size_t i, const DiffPoly& p) const override { return totalDerivative(ctx_, i, p); }
  using JetRegime::total;
  bool sameAs(const JetRegime& other) const override;
  const char* kind() const override { return "free"; }

 private:
  JetContext ctx_;
};

/// System F^k = 0 on J^inf; supports prolongation only.
struct GeneralSystem {
  JetContext ctx;
  std::vector<DiffPoly> equations;
};

/// All D_sigma F^k with |sigma| <= order, k major and sigma graded-lex minor.
std::vector<DiffPoly> prolong(const GeneralSystem& sys, unsigned order);

/// Evolution system u^j_t = f^j(x, t, u, spatial derivatives). Acts as the
/// regime of its infinite prolongation in internal coordinates.
class EvolutionSystem final : public JetRegime {
 public:
  /// ctx must designate a time variable; each f^j must be internal.
  EvolutionSystem(JetContext ctx, std::vector<DiffPoly> rhs);
  static std::shared_ptr<const EvolutionSystem> make(JetContext ctx, std::vector<DiffPoly> rhs) {
    return std::make_shared<const EvolutionSystem>(std::move(ctx), std::move(rhs));
  }

  const JetContext& context() const override { return ctx_; }
  const std::vector<DiffPoly>& rhs() const noexcept { return rhs_; }
  std::size_t timeIndex() const { return *ctx_.time(); }
  /// max |sigma| over the jet variables of the right-hand sides.
  unsigned order() const;

  /// Restricted total derivative; for time this is the evolution derivative
  ///   D_t p = dp/dt + sum_{j, sigma spatial} D_sigma(f^j) dp/du^j_sigma.
  DiffPoly total(std::size_t i, const DiffPoly& p) const override;
  using JetRegime::total;
  DiffPoly restrictedTime(const DiffPoly& p) const;

  /// Internal-coordinate image of u^j_sigma (sigma may contain time).
  DiffPoly internalJet(std::size_t j, const MultiIndex& sigma) const;
  /// Rewrites every time-derivative jet variable via u_t = f.
  DiffPoly toInternal(const DiffPoly& p) const;
  bool isInternal(const DiffPoly& p) const;

  bool sameAs(const JetRegime& other) const override { return this == &other; }
  const char* kind() const override { return "evolution"; }

 private:
  JetContext ctx_;
  std::vector<DiffPoly> rhs_;
  mutable std::mutex cacheMutex_;
  mutable std::map<std::pair<std::size_t, MultiIndex>, DiffPoly> jetCache_;
};

using EvolutionPtr = std::shared_ptr<const EvolutionSystem>;

}  // namespace jetcalc
