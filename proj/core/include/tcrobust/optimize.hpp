#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcrobust/ledger.hpp"
#include "tcrobust/market.hpp"
#include "tcrobust/utility.hpp"

namespace tcr {

struct RobustValue {
  double value = 0.0;            // min over models
  std::size_t argmin = 0;        // lowest index on ties
  std::vector<double> per_model; // E[U(V^liq_T(theta, .))]
};

/// min_theta sum_omega p_omega U(V^liq_T(theta, omega)). Throws DomainError
/// naming (theta, omega) when a terminal liquidation value is <= 0.
RobustValue robust_value(const Strategy& strategy, const ModelFamily& family, const Utility& U);

/// Same objective for increments z of a ledger's layout.
RobustValue robust_value(const LinearLedger& ledger, const ScenarioTree& tree, const Utility& U,
                         double x, std::span<const double> z);

struct SolveOptions {
  double tol = 1e-8;             // target gap of the barrier path
  std::size_t max_iters = 2000;  // Newton steps in total
  std::uint64_t seed = 0;        // jitter of the interior starting point
  std::optional<double> lambda_prime;  // defaults to the family's, else lambda / 2
};

struct SolveReport {
  std::size_t iterations = 0;     // Newton steps
  std::size_t barrier_rounds = 0;
  double gap_bound = 0.0;         // m / t at the last centering
  bool certified = false;
  std::size_t hypothesis_model = 0;  // model with a lambda'-consistent price system
  double lambda_prime = 0.0;
  std::size_t shrink_steps = 0;   // uniform shrinkage applied by the final polish
  std::string message;
};

struct RobustSolution {
  Strategy strategy;
  RobustValue value;
  SolveReport report;
};

/// Maximizes the worst-case expected utility of terminal liquidation value
/// over strategies that are admissible under every model, trading at the
/// tree's discrete slots. Solved on the epigraph
///   max m  s.t.  E[U(w_theta)] >= m,  w_theta <= V^liq_T(theta),
/// with a logarithmic barrier on every inequality (including intermediate
/// admissibility) and Newton centering along a geometrically decreasing
/// barrier weight.
///
/// Throws HypothesisError when no model admits a lambda'-consistent price
/// system.
RobustSolution solve_robust(const ModelFamily& family, const Utility& U, double x,
                            const SolveOptions& options = {});

}  // namespace tcr
