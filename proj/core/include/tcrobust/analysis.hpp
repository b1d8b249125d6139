#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcrobust/cps.hpp"
#include "tcrobust/ledger.hpp"
#include "tcrobust/market.hpp"
#include "tcrobust/paths.hpp"

namespace tcr {

struct DeflatedValue {
  LadlagPath deflated;      // X = Z0 (H0 + H1 S~) = Z0 H0 + Z1 H1
  LadlagPath shadow_value;  // V~ = H0 + H1 S~
};

/// Value of a strategy in shadow-price units and deflated by Z0, in one scenario.
DeflatedValue deflated_value_process(const Strategy& strategy, const ConsistentPriceSystem& cps,
                                     const ModelFamily& family, std::size_t theta,
                                     std::size_t omega);

struct SupermartingaleCheck {
  bool ok = true;
  /// min over transitions and cells of X_j - E[X_{j+1} | G_j].
  double worst_slack = 0.0;
  double worst_time = 0.0;
  LimitKind worst_kind = LimitKind::Value;
};

/// One-step test of E[X_{j+1} | G_j] <= X_j along 0, 0+, e-, e, e+, ..., T,
/// with G_j the information at inspection point j. Jumps of X away from the
/// tree events are inspected too (under the information then in force).
/// Throws ContractViolation when X is not adapted.
SupermartingaleCheck check_optional_strong_supermartingale(std::span<const LadlagPath> X,
                                                           const ScenarioTree& tree,
                                                           double tol = 1e-9);

struct VariationReport {
  double expected_up = 0.0;     // E_Q[H0 up at T]
  double expected_total = 0.0;  // E_Q[H0 up + H0 down at T]
  double bound_up = 0.0;        // x / (lambda - lambda')
  double bound_total = 0.0;     // x (1 + 2 / (lambda - lambda'))
  double expected_surplus = 0.0;
  /// Per scenario (lambda - lambda') / (1 - lambda) * H0 up: the extra cash the
  /// lambda'-agent collects when copying the strategy.
  std::vector<LadlagPath> surplus;
  std::vector<std::string> violations;  // unmet preconditions
  bool pass = false;
};

/// Expected cash-account variation of a liquidated admissible strategy under
/// the measure of a lambda'-consistent price system, against its a priori bounds.
VariationReport variation_bounds(const Strategy& strategy, const ConsistentPriceSystem& cps,
                                 const ModelFamily& family, std::size_t theta_prime,
                                 double lambda, double lambda_prime, double x,
                                 double tol = 1e-9);

struct SuperhedgeResult {
  double price = 0.0;
  std::optional<Strategy> witness;  // empty when the price is 0
  bool exact = false;               // decided in rational arithmetic
};

/// Smallest x for which some admissible strategy under model theta ends with
/// V^liq_T >= claim, over the layout's discrete trading slots. The claim must be
/// constant on the cells of the final information partition.
SuperhedgeResult superhedge_price(const std::vector<double>& claim, const ModelFamily& family,
                                  std::size_t theta);

/// max over the supplied duals of E[g Z0_T]. Each dual must pass verify_cps at
/// the family's lambda (boundary points of the closure allowed).
double dual_bound(const std::vector<double>& claim, const ModelFamily& family, std::size_t theta,
                  std::span<const ConsistentPriceSystem> duals);

/// Admissible (for every model) and liquidated strategy maximizing
/// sum_omega weight_omega * H0 up_T(theta, omega). Empty when unbounded.
std::optional<Strategy> max_churn_strategy(const ModelFamily& family, std::size_t theta,
                                           std::span<const double> weights, double x);

}  // namespace tcr
