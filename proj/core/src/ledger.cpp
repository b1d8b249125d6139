#include "tcrobust/ledger.hpp"

#include <algorithm>
#include <cmath>

#include "tcrobust/errors.hpp"
#include "tcrobust/integration.hpp"

namespace tcr {

namespace {

void require_model(const ModelFamily& family, const Strategy& strategy, std::size_t theta,
                   std::size_t omega) {
  if (theta >= family.num_models()) throw ContractViolation("model index out of range");
  if (omega >= family.tree().num_scenarios()) throw ContractViolation("scenario index out of range");
  if (strategy.layout().num_scenarios() != family.tree().num_scenarios() ||
      strategy.layout().event_times() != family.tree().event_times()) {
    throw ContractViolation("strategy layout does not belong to this tree");
  }
}

}  // namespace

LadlagPath bond_ledger(const Strategy& strategy, const ModelFamily& family, std::size_t theta,
                       std::size_t omega) {
  require_model(family, strategy, theta, omega);
  const auto& tree = family.tree();
  const double T = tree.horizon();
  const double lam = family.lambda();
  const auto times = tree.event_times();
  const LadlagPath S = family.price(theta, omega).refined(times);
  const LadlagPath bought = strategy.purchases(omega);
  const LadlagPath sold = strategy.sales(omega);

  for (std::size_t j = 0; j < S.slopes().size(); ++j) {
    if (S.segment_length(j) > 0.0 && S.slopes()[j] != 0.0 &&
        (bought.slopes()[j] != 0.0 || sold.slopes()[j] != 0.0)) {
      throw ContractViolation(
          "bond_ledger: continuous trading against a sloped price segment has a "
          "quadratic cash path, which is not representable");
    }
  }

  auto cash_at = [&](double t) {
    return strategy.x() - integrate(S, bought, 0.0, t) + (1.0 - lam) * integrate(S, sold, 0.0, t);
  };
  auto trade_cash = [&](double price, double b, double s) { return -price * b + (1.0 - lam) * price * s; };

  const double S0 = S.value_at(0.0);
  const double right0 =
      strategy.x() + trade_cash(S0, bought.initial_right_jump(), sold.initial_right_jump());

  std::vector<KnotValues> knots;
  knots.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double e = times[k];
    KnotValues kv;
    kv.time = e;
    kv.value = cash_at(e);
    kv.left = kv.value - trade_cash(S.left_limit_at(e), bought.left_jump_at(e), sold.left_jump_at(e));
    kv.right = e < T ? kv.value + trade_cash(S.value_at(e), bought.right_jump_at(e),
                                             sold.right_jump_at(e))
                     : kv.value;
    knots.push_back(kv);
  }
  const bool horizon_event = !times.empty() && times.back() == T;
  return LadlagPath::from_knots(T, strategy.x(), right0, knots, horizon_event ? 0.0 : cash_at(T));
}

double liquidation_value(double cash, double shares, double price, double lambda) {
  return shares >= 0.0 ? cash + shares * (1.0 - lambda) * price : cash + shares * price;
}

double liquidation_value(const Strategy& strategy, const ModelFamily& family, std::size_t theta,
                         std::size_t omega, double t, LimitKind kind) {
  const auto cash = bond_ledger(strategy, family, theta, omega);
  const auto pos = strategy.shares(omega);
  const auto& S = family.price(theta, omega);
  const double price = kind == LimitKind::Left ? S.left_limit_at(t) : S.value_at(t);
  return liquidation_value(cash.at(t, kind), pos.at(t, kind), price, family.lambda());
}

std::vector<Checkpoint> checkpoints(const ScenarioTree& tree) {
  std::vector<Checkpoint> out;
  const double T = tree.horizon();
  out.push_back({0.0, LimitKind::Value, Checkpoint::npos});
  out.push_back({0.0, LimitKind::Right, Checkpoint::npos});
  for (std::size_t k = 0; k < tree.num_events(); ++k) {
    const double e = tree.events()[k].time;
    out.push_back({e, LimitKind::Left, k});
    out.push_back({e, LimitKind::Value, k});
    if (e < T) out.push_back({e, LimitKind::Right, k});
  }
  if (!tree.event_at_horizon()) out.push_back({T, LimitKind::Value, Checkpoint::npos});
  return out;
}

const Partition& checkpoint_partition(const ScenarioTree& tree, const Checkpoint& cp) {
  if (cp.event == Checkpoint::npos) {
    return cp.time == 0.0 ? tree.root() : tree.layer(tree.num_events());
  }
  const auto& ev = tree.events()[cp.event];
  return cp.kind == LimitKind::Left ? ev.pre : ev.post;
}

AdmissibilityResult is_admissible(const Strategy& strategy, const ModelFamily& family, double tol) {
  const auto& tree = family.tree();
  const auto cps = checkpoints(tree);
  for (std::size_t theta = 0; theta < family.num_models(); ++theta) {
    for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
      const auto cash = bond_ledger(strategy, family, theta, w);
      const auto pos = strategy.shares(w);
      const auto& S = family.price(theta, w);
      for (const auto& cp : cps) {
        const double price = cp.kind == LimitKind::Left ? S.left_limit_at(cp.time) : S.value_at(cp.time);
        const double v = liquidation_value(cash.at(cp.time, cp.kind), pos.at(cp.time, cp.kind), price,
                                           family.lambda());
        if (v < -tol) {
          return {false, AdmissibilityViolation{theta, w, cp.time, cp.kind, v}};
        }
      }
    }
  }
  return {};
}

bool check_self_financing(std::span<const LadlagPath> cash, const Strategy& strategy,
                          const ModelFamily& family, std::size_t theta, double tol) {
  const auto& tree = family.tree();
  if (cash.size() != tree.num_scenarios()) {
    throw ContractViolation("check_self_financing: one cash path per scenario required");
  }
  const double T = tree.horizon();
  const double lam = family.lambda();
  const auto tree_times = tree.event_times();

  for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
    require_model(family, strategy, theta, w);
    if (cash[w].horizon() != T) throw ContractViolation("check_self_financing: horizon mismatch");

    std::vector<double> grid = tree_times;
    for (const auto& e : cash[w].events()) grid.push_back(e.time);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const LadlagPath H0 = cash[w].refined(grid);
    const LadlagPath S = family.price(theta, w).refined(grid);
    const LadlagPath B = strategy.purchases(w).refined(grid);
    const LadlagPath Q = strategy.sales(w).refined(grid);
    auto bound = [&](double price, double b, double s) { return -price * b + (1.0 - lam) * price * s + tol; };

    if (H0.initial_value() > strategy.x() + tol) return false;
    const double S0 = S.value_at(0.0);
    if (H0.initial_right_jump() > bound(S0, B.initial_right_jump(), Q.initial_right_jump())) return false;

    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto& c = H0.events()[i];
      const double t = c.time;
      if (c.left_jump > bound(S.left_limit_at(t), B.events()[i].left_jump, Q.events()[i].left_jump)) {
        return false;
      }
      if (t < T && c.right_jump > bound(S.value_at(t), B.events()[i].right_jump, Q.events()[i].right_jump)) {
        return false;
      }
    }
    for (std::size_t j = 0; j < H0.slopes().size(); ++j) {
      const double len = H0.segment_length(j);
      if (!(len > 0.0)) continue;
      const double a = H0.segment_start(j);
      const double b = a + len;
      const double rate_b = B.slopes()[j];
      const double rate_s = Q.slopes()[j];
      const double slope = H0.slopes()[j];
      // The bound is linear in t on the segment; check both ends.
      if (slope > bound(S.right_limit_at(a), rate_b, rate_s) ||
          slope > bound(S.left_limit_at(b), rate_b, rate_s)) {
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

LinearLedger::LinearLedger(const ModelFamily& family, std::shared_ptr<const StrategyLayout> layout)
    : layout_(std::move(layout)),
      checkpoints_(tcr::checkpoints(family.tree())),
      num_models_(family.num_models()),
      num_scenarios_(family.tree().num_scenarios()),
      lambda_(family.lambda()) {
  const auto& tree = family.tree();
  const auto& L = *layout_;
  if (L.event_times() != tree.event_times() || L.num_scenarios() != tree.num_scenarios()) {
    throw ContractViolation("LinearLedger: layout does not belong to this tree");
  }
  const std::size_t n = L.size();
  const std::size_t nv = 2 * n;
  const std::size_t ncp = checkpoints_.size();
  const double lam = lambda_;
  cash_.assign(num_models_ * num_scenarios_ * ncp * nv, 0.0);
  shares_.assign(num_scenarios_ * ncp * nv, 0.0);
  prices_.assign(num_models_ * num_scenarios_ * ncp, 0.0);

  for (std::size_t theta = 0; theta < num_models_; ++theta) {
    for (std::size_t w = 0; w < num_scenarios_; ++w) {
      const auto& S = family.price(theta, w);
      std::vector<double> a(nv, 0.0), b(nv, 0.0);
      double t_prev = 0.0;
      auto trade = [&](std::size_t slot, double price, double scale) {
        a[slot] -= price * scale;
        a[n + slot] += (1.0 - lam) * price * scale;
        b[slot] += scale;
        b[n + slot] -= scale;
      };
      auto advance = [&](std::size_t interval, double t) {
        if (!L.continuous_trading()) return;
        const auto r = L.rate_slot(interval, w);
        if (r == StrategyLayout::npos || !(t > t_prev)) return;
        const double avg = 0.5 * (S.right_limit_at(t_prev) + S.left_limit_at(t));
        trade(r, avg, t - t_prev);
      };
      for (std::size_t c = 0; c < ncp; ++c) {
        const auto& cp = checkpoints_[c];
        double price = 0.0;
        if (cp.event == Checkpoint::npos) {
          if (cp.time == 0.0) {
            price = S.value_at(0.0);
            if (cp.kind == LimitKind::Right) trade(L.initial_slot(w), price, 1.0);
          } else {
            advance(tree.num_events(), cp.time);
            price = S.value_at(cp.time);
          }
        } else {
          const std::size_t k = cp.event;
          switch (cp.kind) {
            case LimitKind::Left:
              advance(k, cp.time);
              price = S.left_limit_at(cp.time);
              break;
            case LimitKind::Value:
              trade(L.left_slot(k, w), S.left_limit_at(cp.time), 1.0);
              price = S.value_at(cp.time);
              break;
            case LimitKind::Right:
              price = S.value_at(cp.time);
              trade(L.right_slot(k, w), price, 1.0);
              t_prev = cp.time;
              break;
          }
        }
        std::copy(a.begin(), a.end(), cash_.begin() + static_cast<std::ptrdiff_t>(index(theta, w, c) * nv));
        if (theta == 0) {
          std::copy(b.begin(), b.end(),
                    shares_.begin() + static_cast<std::ptrdiff_t>((w * ncp + c) * nv));
        }
        prices_[index(theta, w, c)] = price;
      }
    }
  }
}

std::span<const double> LinearLedger::cash_coef(std::size_t theta, std::size_t omega,
                                                std::size_t cp) const {
  const std::size_t nv = num_vars();
  return {cash_.data() + index(theta, omega, cp) * nv, nv};
}

std::span<const double> LinearLedger::share_coef(std::size_t omega, std::size_t cp) const {
  const std::size_t nv = num_vars();
  return {shares_.data() + (omega * checkpoints_.size() + cp) * nv, nv};
}

double LinearLedger::price(std::size_t theta, std::size_t omega, std::size_t cp) const {
  return prices_[index(theta, omega, cp)];
}

namespace {
double dot(std::span<const double> a, std::span<const double> z) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * z[i];
  return s;
}
}  // namespace

double LinearLedger::cash(std::size_t theta, std::size_t omega, std::size_t cp, double x,
                          std::span<const double> z) const {
  return x + dot(cash_coef(theta, omega, cp), z);
}

double LinearLedger::shares(std::size_t omega, std::size_t cp, std::span<const double> z) const {
  return dot(share_coef(omega, cp), z);
}

double LinearLedger::liquidation(std::size_t theta, std::size_t omega, std::size_t cp, double x,
                                 std::span<const double> z) const {
  return liquidation_value(cash(theta, omega, cp, x, z), shares(omega, cp, z),
                           price(theta, omega, cp), lambda_);
}

}  // namespace tcr
