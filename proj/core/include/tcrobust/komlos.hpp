#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "tcrobust/market.hpp"
#include "tcrobust/paths.hpp"

namespace tcr {

struct KomlosOptions {
  /// Largest admissible max_omega |H^1|_T among the inputs; inputs beyond it
  /// are rejected. Unset means no cap.
  std::optional<double> variation_cap;
  double tol = 1e-9;  // admissibility tolerance
};

struct KomlosResult {
  /// g_n in conv(f_n, ..., f_N) for n = 1..ceil(N/2) (0-based in the vector).
  std::vector<Strategy> combinations;
  /// weights[n][j] is the weight of input n + j in combinations[n].
  std::vector<std::vector<double>> weights;
  std::optional<Strategy> limit;  // the last combination
  bool limit_admissible = false;
};

/// Forward convex combinations of a bounded sequence of admissible
/// strategies. g_n is the point of conv(f_n, ..., f_N) (in increment space)
/// closest to the Cesàro mean of the whole sequence; the distances are
/// nondecreasing in n and the nested hulls force the g_n to settle.
///
/// Throws ContractViolation if an input is not admissible or the layouts
/// differ, DomainError when an input exceeds the variation cap.
KomlosResult komlos_stabilize(std::span<const Strategy> strategies, const ModelFamily& family,
                              const KomlosOptions& options = {});

/// Weights of the point of conv(points) closest to `target` (Wolfe's
/// minimum-norm-point method). All points must have the target's dimension.
std::vector<double> nearest_in_hull(std::span<const std::vector<double>> points,
                                    std::span<const double> target);

struct ConvergenceOptions {
  double threshold = 1e-6;  // integral error defining the stable tail
  /// At every inspected limit the last pointwise error must be <= abs_tol or
  /// at most `decay` times the largest error along the sequence.
  double decay = 0.5;
  double abs_tol = 1e-12;
};

struct ConvergenceTable {
  std::vector<double> times;               // t in the grid, all > 0
  std::vector<std::vector<double>> errors; // [n][t] |int_0^t S dH^n - int_0^t S dH|
  std::size_t stable_from = npos;          // first n with every later error < threshold
  bool pointwise_convergent = true;
  double offending_time = 0.0;             // where pointwise convergence failed
  LimitKind offending_kind = LimitKind::Value;

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
};

/// Integral errors of a sequence H^n -> H against a càdlàg integrand S, with
/// a finite-sample check that H^n converges to H at every event limit.
ConvergenceTable convergence_demo(std::span<const LadlagPath> sequence, const LadlagPath& limit,
                                  const LadlagPath& S, std::span<const double> grid,
                                  const ConvergenceOptions& options = {});

}  // namespace tcr
