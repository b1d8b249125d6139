#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tcrobust/market.hpp"
#include "tcrobust/paths.hpp"

namespace tcr {

/// Cash account H^{0,theta} of a strategy in one scenario:
/// x + int (1 - lambda) S dH^{1,down} - int S dH^{1,up}.
LadlagPath bond_ledger(const Strategy& strategy, const ModelFamily& family, std::size_t theta,
                       std::size_t omega);

/// H^0 + (H^1)^+ (1 - lambda) S - (H^1)^- S.
double liquidation_value(double cash, double shares, double price, double lambda);

/// Liquidation value of the strategy at (t, kind) in scenario omega under model theta.
double liquidation_value(const Strategy& strategy, const ModelFamily& family, std::size_t theta,
                         std::size_t omega, double t, LimitKind kind = LimitKind::Value);

/// A time at which a process is inspected. `event` is the 0-based tree event
/// at `time`, or npos for 0 and for a horizon that is not an event.
struct Checkpoint {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  double time = 0.0;
  LimitKind kind = LimitKind::Value;
  std::size_t event = npos;
};

/// 0, 0+, then (e-, e, e+) for each event (no e+ at T), then T when the
/// horizon is not an event. The last entry is always the value at T.
std::vector<Checkpoint> checkpoints(const ScenarioTree& tree);

/// The information partition that determines a process at a checkpoint.
const Partition& checkpoint_partition(const ScenarioTree& tree, const Checkpoint& cp);

struct AdmissibilityViolation {
  std::size_t theta = 0;
  std::size_t omega = 0;
  double time = 0.0;
  LimitKind kind = LimitKind::Value;
  double value = 0.0;
};

struct AdmissibilityResult {
  bool admissible = true;
  std::optional<AdmissibilityViolation> violation;
};

/// V^liq >= -tol at every checkpoint for every model and scenario.
/// Between checkpoints the liquidation value is linear or concave in t, so
/// these checks are complete for representable strategies.
AdmissibilityResult is_admissible(const Strategy& strategy, const ModelFamily& family,
                                  double tol = 1e-9);

/// Checks the self-financing inequalities (continuous, left-jump and
/// right-jump parts) of a cash process against the share process.
bool check_self_financing(std::span<const LadlagPath> cash, const Strategy& strategy,
                          const ModelFamily& family, std::size_t theta, double tol = 1e-9);

/// Affine forms of cash and shares at every checkpoint, in terms of the
/// increment vector z = [buy..., sell...] of a layout:
///   H^0 = x + cash_coef . z,   H^1 = share_coef . z.
/// The forms are built directly from the trade prices (left limits for left
/// trades, values for right trades, segment averages for rates), which is an
/// independent route to the same numbers bond_ledger produces.
class LinearLedger {
 public:
  LinearLedger(const ModelFamily& family, std::shared_ptr<const StrategyLayout> layout);

  std::size_t num_vars() const noexcept { return 2 * layout_->size(); }
  std::size_t num_models() const noexcept { return num_models_; }
  std::size_t num_scenarios() const noexcept { return num_scenarios_; }
  const std::vector<Checkpoint>& checkpoints() const noexcept { return checkpoints_; }
  std::size_t terminal() const noexcept { return checkpoints_.size() - 1; }
  double lambda() const noexcept { return lambda_; }
  const std::shared_ptr<const StrategyLayout>& layout() const noexcept { return layout_; }

  std::span<const double> cash_coef(std::size_t theta, std::size_t omega, std::size_t cp) const;
  std::span<const double> share_coef(std::size_t omega, std::size_t cp) const;
  double price(std::size_t theta, std::size_t omega, std::size_t cp) const;

  double cash(std::size_t theta, std::size_t omega, std::size_t cp, double x,
              std::span<const double> z) const;
  double shares(std::size_t omega, std::size_t cp, std::span<const double> z) const;
  double liquidation(std::size_t theta, std::size_t omega, std::size_t cp, double x,
                     std::span<const double> z) const;

 private:
  std::size_t index(std::size_t theta, std::size_t omega, std::size_t cp) const {
    return (theta * num_scenarios_ + omega) * checkpoints_.size() + cp;
  }

  std::shared_ptr<const StrategyLayout> layout_;
  std::vector<Checkpoint> checkpoints_;
  std::size_t num_models_;
  std::size_t num_scenarios_;
  double lambda_;
  std::vector<double> cash_;    // [theta][omega][cp][var]
  std::vector<double> shares_;  // [omega][cp][var]
  std::vector<double> prices_;  // [theta][omega][cp]
};

}  // namespace tcr
