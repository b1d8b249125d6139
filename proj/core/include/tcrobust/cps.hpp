#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tcrobust/linprog.hpp"
#include "tcrobust/market.hpp"

namespace tcr {

/// lambda-consistent price system on a scenario tree.
///
/// Z0 and Z1 are constant between events and jump only at events (càdlàg):
/// layer k holds the values in force on [e_k, e_{k+1}), one per cell of
/// tree.layer(k). The shadow price is Z1 / Z0 and the associated measure is
/// q_omega = p_omega * Z0_T(omega).
struct ConsistentPriceSystem {
  std::size_t theta = 0;
  double lambda = 0.0;
  std::vector<std::vector<double>> z0;  // [layer][cell]
  std::vector<std::vector<double>> z1;  // [layer][cell]

  double z0_at(const ScenarioTree& tree, std::size_t layer, std::size_t omega) const;
  double z1_at(const ScenarioTree& tree, std::size_t layer, std::size_t omega) const;
  double shadow_price(const ScenarioTree& tree, std::size_t layer, std::size_t omega) const;
  /// Z0_T per scenario.
  std::vector<double> terminal_density(const ScenarioTree& tree) const;
  /// q_omega = p_omega * Z0_T(omega).
  std::vector<double> measure(const ScenarioTree& tree) const;
};

struct CpsOptions {
  double delta = 1e-6;  // Z0 >= delta
  /// Solve in rationals when the double solve is not conclusive.
  bool exact_fallback = true;
};

struct CpsSearch {
  std::optional<ConsistentPriceSystem> cps;  // empty when infeasible
  double min_slack = 0.0;  // optimal value of the max-min spread slack
  bool exact = false;      // decided in rational arithmetic
};

/// Looks for a lambda_check-consistent price system for model theta by
/// maximizing the smallest spread slack subject to the martingale and
/// normalization constraints. Feasible iff that optimum is >= 0.
CpsSearch search_cps(const ModelFamily& family, std::size_t theta, double lambda_check,
                     const CpsOptions& options = {});

/// Convenience wrapper returning only the system (empty when infeasible).
std::optional<ConsistentPriceSystem> find_cps(const ModelFamily& family, std::size_t theta,
                                              double lambda_check, double delta = 1e-6);

struct CpsCheckOptions {
  double tol = 1e-9;
  /// Accept Z0 >= 0 (closure of the set, e.g. polytope vertices).
  bool allow_boundary = false;
};

/// Re-checks normalization, the martingale property (conditioned on the
/// pre-event partitions), the spread at every node value and at the next
/// left limit, and positivity, independently of the solver.
bool verify_cps(const ConsistentPriceSystem& cps, const ModelFamily& family, std::size_t theta,
                double lambda_check, const CpsCheckOptions& options = {});

struct ExtremalCps {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;  // E[g Z0_T]
  std::optional<ConsistentPriceSystem> cps;
};

/// Maximizes E[g Z0_T] over the closure of the lambda-CPS polytope
/// (Z0 >= 0). The optimum is attained at a vertex.
ExtremalCps extremal_cps(const ModelFamily& family, std::size_t theta, double lambda,
                         const std::vector<double>& claim,
                         LpArithmetic arithmetic = LpArithmetic::Double);

}  // namespace tcr
