#include "tcrobust/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "tcrobust/errors.hpp"
#include "tcrobust/integration.hpp"
#include "tcrobust/linprog.hpp"

namespace tcr {

DeflatedValue deflated_value_process(const Strategy& strategy, const ConsistentPriceSystem& cps,
                                     const ModelFamily& family, std::size_t theta,
                                     std::size_t omega) {
  const auto& tree = family.tree();
  if (cps.z0.size() != tree.num_layers() || cps.z1.size() != tree.num_layers()) {
    throw ContractViolation("deflated_value_process: price system does not match the tree");
  }
  const LadlagPath cash = bond_ledger(strategy, family, theta, omega);
  const LadlagPath shares = strategy.shares(omega);
  const double T = tree.horizon();
  const auto times = tree.event_times();

  auto x_at = [&](std::size_t layer, double t, LimitKind kind) {
    return cps.z0_at(tree, layer, omega) * cash.at(t, kind) +
           cps.z1_at(tree, layer, omega) * shares.at(t, kind);
  };
  auto v_at = [&](std::size_t layer, double t, LimitKind kind) {
    return cash.at(t, kind) + shares.at(t, kind) * cps.shadow_price(tree, layer, omega);
  };

  std::vector<KnotValues> xk, vk;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double e = times[k];
    const LimitKind after = e < T ? LimitKind::Right : LimitKind::Value;
    xk.push_back({e, x_at(k, e, LimitKind::Left), x_at(k + 1, e, LimitKind::Value),
                  x_at(k + 1, e, after)});
    vk.push_back({e, v_at(k, e, LimitKind::Left), v_at(k + 1, e, LimitKind::Value),
                  v_at(k + 1, e, after)});
  }
  const std::size_t last = tree.num_layers() - 1;
  const bool horizon_event = tree.event_at_horizon();
  const double xT = horizon_event ? 0.0 : x_at(last, T, LimitKind::Value);
  const double vT = horizon_event ? 0.0 : v_at(last, T, LimitKind::Value);
  return {LadlagPath::from_knots(T, x_at(0, 0.0, LimitKind::Value), x_at(0, 0.0, LimitKind::Right),
                                 xk, xT),
          LadlagPath::from_knots(T, v_at(0, 0.0, LimitKind::Value), v_at(0, 0.0, LimitKind::Right),
                                 vk, vT)};
}

namespace {

struct Inspection {
  double time;
  LimitKind kind;
  const Partition* info;
};

int kind_order(LimitKind k) {
  return k == LimitKind::Left ? 0 : (k == LimitKind::Value ? 1 : 2);
}

}  // namespace

SupermartingaleCheck check_optional_strong_supermartingale(std::span<const LadlagPath> X,
                                                           const ScenarioTree& tree,
                                                           double tol) {
  const std::size_t n = tree.num_scenarios();
  if (X.size() != n) throw ContractViolation("supermartingale check: one path per scenario required");
  const double T = tree.horizon();
  const auto tree_times = tree.event_times();
  for (const auto& path : X) {
    if (path.horizon() != T) throw ContractViolation("supermartingale check: horizon mismatch");
  }

  std::vector<Inspection> grid;
  for (const auto& cp : checkpoints(tree)) {
    grid.push_back({cp.time, cp.kind, &checkpoint_partition(tree, cp)});
  }
  // Jumps of X between tree events happen under the information then in force.
  std::set<double> extra;
  for (const auto& path : X) {
    for (const auto& ev : path.events()) {
      if (!std::binary_search(tree_times.begin(), tree_times.end(), ev.time)) extra.insert(ev.time);
    }
  }
  for (double t : extra) {
    const std::size_t layer = static_cast<std::size_t>(
        std::lower_bound(tree_times.begin(), tree_times.end(), t) - tree_times.begin());
    const Partition* info = &tree.layer(layer);
    grid.push_back({t, LimitKind::Left, info});
    if (t < T) {
      grid.push_back({t, LimitKind::Value, info});
      grid.push_back({t, LimitKind::Right, info});
    }
  }
  std::stable_sort(grid.begin(), grid.end(), [](const Inspection& a, const Inspection& b) {
    if (a.time != b.time) return a.time < b.time;
    return kind_order(a.kind) < kind_order(b.kind);
  });

  // Values per inspection point, with the adaptedness check.
  std::vector<std::vector<double>> vals(grid.size(), std::vector<double>(n));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t w = 0; w < n; ++w) vals[j][w] = X[w].at(grid[j].time, grid[j].kind);
    for (const auto& cell : *grid[j].info) {
      const double ref = vals[j][cell.front()];
      for (std::size_t w : cell) {
        if (std::abs(vals[j][w] - ref) > tol * std::max(1.0, std::abs(ref))) {
          std::ostringstream msg;
          msg << "supermartingale check: process is not adapted at t=" << grid[j].time << " ("
              << to_string(grid[j].kind) << ")";
          throw ContractViolation(msg.str());
        }
      }
    }
  }

  SupermartingaleCheck out;
  out.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    for (const auto& cell : *grid[j].info) {
      const double pc = tree.cell_probability(cell);
      double here = 0.0;
      double next = 0.0;
      for (std::size_t w : cell) {
        here += tree.probability(w) * vals[j][w];
        next += tree.probability(w) * vals[j + 1][w];
      }
      const double slack = (here - next) / pc;
      if (slack < out.worst_slack) {
        out.worst_slack = slack;
        out.worst_time = grid[j].time;
        out.worst_kind = grid[j].kind;
      }
    }
  }
  if (!std::isfinite(out.worst_slack)) out.worst_slack = 0.0;
  out.ok = out.worst_slack >= -tol;
  return out;
}

VariationReport variation_bounds(const Strategy& strategy, const ConsistentPriceSystem& cps,
                                 const ModelFamily& family, std::size_t theta_prime,
                                 double lambda, double lambda_prime, double x, double tol) {
  VariationReport rep;
  const auto& tree = family.tree();
  if (!(lambda > 0.0 && lambda < 1.0)) {
    rep.violations.push_back("lambda must lie in (0, 1)");
    return rep;
  }
  if (!(lambda_prime > 0.0 && lambda_prime < lambda)) {
    rep.violations.push_back("lambda' must lie in (0, lambda)");
    return rep;
  }
  if (theta_prime >= family.num_models()) {
    rep.violations.push_back("model index out of range");
    return rep;
  }
  rep.bound_up = x / (lambda - lambda_prime);
  rep.bound_total = x * (1.0 + 2.0 / (lambda - lambda_prime));

  const ModelFamily fam = family.with_lambda(lambda);
  if (std::abs(strategy.x() - x) > tol * std::max(1.0, std::abs(x))) {
    rep.violations.push_back("strategy endowment differs from x");
  }
  if (const auto adm = is_admissible(strategy, fam, tol); !adm.admissible) {
    std::ostringstream msg;
    msg << "strategy is not admissible at cost lambda (model " << adm.violation->theta
        << ", scenario " << adm.violation->omega << ", t=" << adm.violation->time << ")";
    rep.violations.push_back(msg.str());
  }
  for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
    const double h1 = strategy.shares(w).terminal_value();
    if (std::abs(h1) > tol * std::max(1.0, x)) {
      rep.violations.push_back("strategy is not liquidated at T in scenario " + tree.labels()[w]);
      break;
    }
  }
  if (!verify_cps(cps, family, theta_prime, lambda_prime)) {
    rep.violations.push_back("price system does not verify at lambda'");
    return rep;
  }

  const auto q = cps.measure(tree);
  const std::vector<double> none(strategy.layout().size(), 0.0);
  const Strategy sells(strategy.layout_ptr(), strategy.x(), none, strategy.sell());
  const double factor = (lambda - lambda_prime) / (1.0 - lambda);
  for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
    const auto& S = fam.price(theta_prime, w);
    const double up = (1.0 - lambda) * integrate(S, strategy.sales(w));
    const double down = integrate(S, strategy.purchases(w));
    rep.expected_up += q[w] * up;
    rep.expected_total += q[w] * (up + down);
    rep.expected_surplus += q[w] * factor * up;
    rep.surplus.push_back(factor * shifted(bond_ledger(sells, fam, theta_prime, w), -sells.x()));
  }
  rep.pass = rep.violations.empty() &&
             rep.expected_up <= rep.bound_up + tol * std::max(1.0, rep.bound_up) &&
             rep.expected_total <= rep.bound_total + tol * std::max(1.0, rep.bound_total);
  return rep;
}

namespace {

// Rows V^liq >= rhs written as two linear inequalities (long and short side).
void add_liquidation_rows(LinearProgram& lp, const LinearLedger& ledger, std::size_t theta,
                          std::size_t omega, std::size_t cp, std::size_t offset,
                          std::optional<std::size_t> x_var, double x_const, double rhs) {
  const auto a = ledger.cash_coef(theta, omega, cp);
  const auto b = ledger.share_coef(omega, cp);
  const double S = ledger.price(theta, omega, cp);
  for (const double p : {(1.0 - ledger.lambda()) * S, S}) {
    std::vector<double> row(lp.num_vars(), 0.0);
    if (x_var) row[*x_var] = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) row[offset + i] = a[i] + p * b[i];
    lp.add_row(std::move(row), RowSense::GreaterEqual, rhs - x_const);
  }
}

bool dominates(const Strategy& s, const std::vector<double>& claim, const ModelFamily& family,
               std::size_t theta, double tol) {
  const auto& tree = family.tree();
  for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
    const double v = liquidation_value(s, family, theta, w, tree.horizon());
    if (v < claim[w] - tol * std::max(1.0, std::abs(claim[w]))) return false;
  }
  return true;
}

}  // namespace

SuperhedgeResult superhedge_price(const std::vector<double>& claim, const ModelFamily& family,
                                  std::size_t theta) {
  const auto& tree = family.tree();
  if (theta >= family.num_models()) throw ContractViolation("superhedge_price: model index out of range");
  if (claim.size() != tree.num_scenarios()) {
    throw ContractViolation("superhedge_price: claim has wrong length");
  }
  for (double g : claim) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw ContractViolation("superhedge_price: claim must be finite and nonnegative");
    }
  }
  for (const auto& cell : tree.layer(tree.num_layers() - 1)) {
    for (std::size_t w : cell) {
      if (claim[w] != claim[cell.front()]) {
        throw ContractViolation("superhedge_price: claim is not measurable at T (scenarios " +
                                tree.labels()[cell.front()] + " and " + tree.labels()[w] +
                                " share a terminal cell)");
      }
    }
  }
  auto layout = std::make_shared<const StrategyLayout>(tree);
  const LinearLedger ledger(family, layout);
  const std::size_t nz = ledger.num_vars();
  LinearProgram lp(1 + nz);
  lp.objective[0] = -1.0;
  for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
    for (std::size_t c = 1; c < ledger.checkpoints().size(); ++c) {
      const double rhs = c == ledger.terminal() ? claim[w] : 0.0;
      add_liquidation_rows(lp, ledger, theta, w, c, 1, 0, 0.0, rhs);
    }
  }

  const ModelFamily single = family.single(theta);
  auto build = [&](const LpSolution& sol, bool exact) {
    SuperhedgeResult out;
    out.exact = exact;
    out.price = std::max(0.0, sol.x[0]);
    if (out.price > 0.0) {
      std::vector<double> z(sol.x.begin() + 1, sol.x.end());
      for (double& v : z) v = std::max(0.0, v);
      out.witness = Strategy::from_increments(layout, out.price, z);
    }
    return out;
  };
  auto verified = [&](const SuperhedgeResult& r) {
    const double tol = 1e-9 * std::max(1.0, r.price);
    if (!r.witness) return std::all_of(claim.begin(), claim.end(), [&](double g) { return g <= tol; });
    return is_admissible(*r.witness, single, tol).admissible &&
           dominates(*r.witness, claim, single, 0, 1e-9);
  };

  const auto approx = solve_lp(lp, LpArithmetic::Double);
  if (approx.status == LpStatus::Optimal) {
    auto r = build(approx, false);
    if (verified(r)) return r;
  }
  const auto exact = solve_lp(lp, LpArithmetic::Exact);
  if (exact.status != LpStatus::Optimal) {
    throw std::runtime_error("superhedge_price: linear program ended with status " +
                             std::string(to_string(exact.status)));
  }
  return build(exact, true);
}

double dual_bound(const std::vector<double>& claim, const ModelFamily& family, std::size_t theta,
                  std::span<const ConsistentPriceSystem> duals) {
  const auto& tree = family.tree();
  if (claim.size() != tree.num_scenarios()) throw ContractViolation("dual_bound: claim has wrong length");
  if (duals.empty()) throw ContractViolation("dual_bound: no dual variables supplied");
  CpsCheckOptions opt;
  opt.allow_boundary = true;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < duals.size(); ++i) {
    if (!verify_cps(duals[i], family, theta, family.lambda(), opt)) {
      throw ContractViolation("dual_bound: dual " + std::to_string(i) +
                              " is not a consistent price system at the family's cost level");
    }
    const auto z = duals[i].terminal_density(tree);
    double v = 0.0;
    for (std::size_t w = 0; w < z.size(); ++w) v += tree.probability(w) * claim[w] * z[w];
    best = std::max(best, v);
  }
  return best;
}

std::optional<Strategy> max_churn_strategy(const ModelFamily& family, std::size_t theta,
                                           std::span<const double> weights, double x) {
  const auto& tree = family.tree();
  if (theta >= family.num_models()) throw ContractViolation("max_churn_strategy: model index out of range");
  if (weights.size() != tree.num_scenarios()) {
    throw ContractViolation("max_churn_strategy: weights have wrong length");
  }
  auto layout = std::make_shared<const StrategyLayout>(tree);
  const LinearLedger ledger(family, layout);
  const std::size_t nz = ledger.num_vars();
  const std::size_t n = layout->size();
  const std::size_t last = ledger.terminal();
  LinearProgram lp(nz);
  for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
    const auto a = ledger.cash_coef(theta, w, last);
    for (std::size_t i = n; i < nz; ++i) lp.objective[i] += weights[w] * a[i];
  }
  for (std::size_t th = 0; th < family.num_models(); ++th) {
    for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
      for (std::size_t c = 1; c < ledger.checkpoints().size(); ++c) {
        add_liquidation_rows(lp, ledger, th, w, c, 0, std::nullopt, x, 0.0);
      }
    }
  }
  for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
    const auto b = ledger.share_coef(w, last);
    lp.add_row(std::vector<double>(b.begin(), b.end()), RowSense::Equal, 0.0);
  }
  const auto sol = solve_lp(lp, LpArithmetic::Double);
  if (sol.status != LpStatus::Optimal) return std::nullopt;
  auto z = sol.x;
  for (double& v : z) v = std::max(0.0, v);
  return Strategy::from_increments(layout, x, z);
}

}  // namespace tcr
