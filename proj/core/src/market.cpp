#include "tcrobust/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tcrobust/errors.hpp"

namespace tcr {

std::vector<std::size_t> cell_index(const Partition& partition, std::size_t n) {
  constexpr auto unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> idx(n, unset);
  for (std::size_t c = 0; c < partition.size(); ++c) {
    if (partition[c].empty()) throw ContractViolation("partition: empty cell");
    for (std::size_t w : partition[c]) {
      if (w >= n) throw ContractViolation("partition: scenario index out of range");
      if (idx[w] != unset) throw ContractViolation("partition: cells overlap");
      idx[w] = c;
    }
  }
  if (std::find(idx.begin(), idx.end(), unset) != idx.end()) {
    throw ContractViolation("partition: cells do not cover all scenarios");
  }
  return idx;
}

bool refines(const Partition& fine, const Partition& coarse, std::size_t n) {
  const auto coarse_idx = cell_index(coarse, n);
  for (const auto& cell : fine) {
    for (std::size_t w : cell) {
      if (coarse_idx[w] != coarse_idx[cell.front()]) return false;
    }
  }
  return true;
}

ScenarioTree::ScenarioTree(std::vector<std::string> labels, std::vector<double> probabilities,
                           double horizon, Partition root, std::vector<TreeEvent> events)
    : labels_(std::move(labels)),
      probs_(std::move(probabilities)),
      horizon_(horizon),
      root_(std::move(root)),
      events_(std::move(events)) {
  const std::size_t n = labels_.size();
  if (n == 0) throw ContractViolation("tree: no scenarios");
  if (probs_.size() != n) throw ContractViolation("tree: one probability per scenario required");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p > 0.0)) throw ContractViolation("tree: probabilities must be positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ContractViolation("tree: probabilities must sum to 1");
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw ContractViolation("tree: horizon must be positive");
  }

  root_cell_ = cell_index(root_, n);
  const Partition* prev = &root_;
  double prev_time = 0.0;
  for (const auto& e : events_) {
    if (!(e.time > prev_time) || e.time > horizon_) {
      throw ContractViolation("tree: event times must be strictly increasing in (0, T]");
    }
    pre_cell_.push_back(cell_index(e.pre, n));
    post_cell_.push_back(cell_index(e.post, n));
    if (!refines(e.pre, *prev, n)) {
      throw ContractViolation("tree: pre-event partition must refine the previous one");
    }
    if (!refines(e.post, e.pre, n)) {
      throw ContractViolation("tree: post-event partition must refine the pre-event one");
    }
    prev = &e.post;
    prev_time = e.time;
  }
}

ScenarioTree ScenarioTree::with_trivial_root(std::vector<std::string> labels,
                                             std::vector<double> probabilities, double horizon,
                                             std::vector<TreeEvent> events) {
  std::vector<std::size_t> all(labels.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return ScenarioTree(std::move(labels), std::move(probabilities), horizon, Partition{all},
                      std::move(events));
}

std::vector<double> ScenarioTree::event_times() const {
  std::vector<double> out;
  out.reserve(events_.size());
  for (const auto& e : events_) out.push_back(e.time);
  return out;
}

const Partition& ScenarioTree::layer(std::size_t k) const {
  return k == 0 ? root_ : events_.at(k - 1).post;
}

double ScenarioTree::cell_probability(const std::vector<std::size_t>& cell) const {
  double p = 0.0;
  for (std::size_t w : cell) p += probs_.at(w);
  return p;
}

std::optional<std::size_t> ScenarioTree::scenario_index(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

// ---------------------------------------------------------------------------

ModelFamily::ModelFamily(ScenarioTree tree, std::vector<PriceModel> models, double lambda,
                         std::optional<double> lambda_prime)
    : tree_(std::move(tree)),
      models_(std::move(models)),
      lambda_(lambda),
      lambda_prime_(lambda_prime) {
  validate();
}

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a)); }

void require_constant_on(const Partition& partition, const std::vector<double>& values,
                         const std::string& what) {
  for (const auto& cell : partition) {
    for (std::size_t w : cell) {
      if (!close(values[w], values[cell.front()])) {
        throw ContractViolation("model family: " + what + " is not adapted");
      }
    }
  }
}

}  // namespace

void ModelFamily::validate() const {
  if (!(lambda_ > 0.0 && lambda_ < 1.0)) {
    throw ContractViolation("model family: lambda must lie in (0, 1)");
  }
  if (lambda_prime_ && !(*lambda_prime_ > 0.0 && *lambda_prime_ < lambda_)) {
    throw ContractViolation("model family: lambda_prime must lie in (0, lambda)");
  }
  if (models_.empty()) throw ContractViolation("model family: no models");

  const std::size_t n = tree_.num_scenarios();
  const double T = tree_.horizon();
  const auto times = tree_.event_times();
  for (const auto& m : models_) {
    if (m.paths.size() != n) {
      throw ContractViolation("model family: model '" + m.label + "' needs one path per scenario");
    }
    for (const auto& p : m.paths) {
      if (p.horizon() != T) throw ContractViolation("model family: path horizon differs from tree");
      if (!p.is_cadlag()) throw ContractViolation("model family: price paths must be càdlàg");
      for (const auto& e : p.events()) {
        if (!std::binary_search(times.begin(), times.end(), e.time)) {
          throw ContractViolation("model family: price events must be tree events");
        }
      }
      const auto r = p.refined(times);
      bool positive = r.initial_value() > 0.0 && r.terminal_value() > 0.0;
      for (std::size_t k = 0; k < r.events().size(); ++k) {
        positive = positive && r.event_knot(k).left > 0.0 && r.event_knot(k).value > 0.0;
      }
      if (!positive) {
        throw ContractViolation("model family: prices must be strictly positive ('" + m.label + "')");
      }
    }

    std::vector<double> v(n), s(n);
    const std::string name = "model '" + m.label + "'";
    for (std::size_t w = 0; w < n; ++w) {
      const auto r = m.paths[w].refined(times);
      v[w] = r.initial_value();
      s[w] = r.slopes()[0];
    }
    require_constant_on(tree_.root(), v, name + " initial price");
    require_constant_on(tree_.root(), s, name + " initial slope");
    for (std::size_t k = 0; k < times.size(); ++k) {
      std::vector<double> left(n);
      for (std::size_t w = 0; w < n; ++w) {
        const auto r = m.paths[w].refined(times);
        left[w] = r.event_knot(k).left;
        v[w] = r.event_knot(k).value;
        s[w] = r.segment_length(k + 1) > 0.0 ? r.slopes()[k + 1] : 0.0;
      }
      require_constant_on(tree_.events()[k].pre, left, name + " left limit");
      require_constant_on(tree_.events()[k].post, v, name + " price at event");
      require_constant_on(tree_.events()[k].post, s, name + " slope after event");
    }
  }
}

ModelFamily ModelFamily::with_lambda(double lambda) const {
  std::optional<double> lp = lambda_prime_;
  if (lp && !(*lp < lambda)) lp.reset();
  return ModelFamily(tree_, models_, lambda, lp);
}

ModelFamily ModelFamily::single(std::size_t theta) const {
  return ModelFamily(tree_, {models_.at(theta)}, lambda_, lambda_prime_);
}

std::optional<std::size_t> ModelFamily::model_index(const std::string& label) const {
  for (std::size_t i = 0; i < models_.size(); ++i) {
    if (models_[i].label == label) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SlotKind kind) {
  switch (kind) {
    case SlotKind::Initial:
      return "initial";
    case SlotKind::Left:
      return "left";
    case SlotKind::Right:
      return "right";
    case SlotKind::Rate:
      return "rate";
  }
  return "?";
}

StrategyLayout::StrategyLayout(const ScenarioTree& tree, bool continuous_trading)
    : continuous_(continuous_trading), horizon_(tree.horizon()), event_times_(tree.event_times()) {
  const std::size_t n = tree.num_scenarios();
  const std::size_t ne = tree.num_events();
  root_cell_.resize(n);
  for (std::size_t c = 0; c < tree.root().size(); ++c) {
    for (std::size_t w : tree.root()[c]) root_cell_[w] = slots_.size() + c;
  }
  for (std::size_t c = 0; c < tree.root().size(); ++c) {
    slots_.push_back({SlotKind::Initial, 0, c, 0.0});
  }

  left_.assign(ne, std::vector<std::size_t>(n, npos));
  right_.assign(ne, std::vector<std::size_t>(n, npos));
  rate_.assign(ne + 1, std::vector<std::size_t>(n, npos));

  auto add_rate = [&](std::size_t j) {
    const double start = j == 0 ? 0.0 : event_times_[j - 1];
    const double end = j < ne ? event_times_[j] : horizon_;
    if (!(end > start)) return;
    const Partition& cells = tree.layer(j);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      for (std::size_t w : cells[c]) rate_[j][w] = slots_.size();
      slots_.push_back({SlotKind::Rate, j, c, start});
    }
  };

  if (continuous_) add_rate(0);
  for (std::size_t k = 0; k < ne; ++k) {
    const auto& ev = tree.events()[k];
    for (std::size_t c = 0; c < ev.pre.size(); ++c) {
      for (std::size_t w : ev.pre[c]) left_[k][w] = slots_.size();
      slots_.push_back({SlotKind::Left, k, c, ev.time});
    }
    if (ev.time < horizon_) {
      for (std::size_t c = 0; c < ev.post.size(); ++c) {
        for (std::size_t w : ev.post[c]) right_[k][w] = slots_.size();
        slots_.push_back({SlotKind::Right, k, c, ev.time});
      }
    }
    if (continuous_) add_rate(k + 1);
  }
}

std::size_t StrategyLayout::initial_slot(std::size_t omega) const { return root_cell_.at(omega); }
std::size_t StrategyLayout::left_slot(std::size_t event, std::size_t omega) const {
  return left_.at(event).at(omega);
}
std::size_t StrategyLayout::right_slot(std::size_t event, std::size_t omega) const {
  return right_.at(event).at(omega);
}
std::size_t StrategyLayout::rate_slot(std::size_t interval, std::size_t omega) const {
  return rate_.at(interval).at(omega);
}

bool StrategyLayout::same_shape(const StrategyLayout& other) const {
  if (this == &other) return true;
  if (slots_.size() != other.slots_.size() || horizon_ != other.horizon_ ||
      event_times_ != other.event_times_ || root_cell_ != other.root_cell_) {
    return false;
  }
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    const auto& a = slots_[i];
    const auto& b = other.slots_[i];
    if (a.kind != b.kind || a.index != b.index || a.cell != b.cell) return false;
  }
  return left_ == other.left_ && right_ == other.right_ && rate_ == other.rate_;
}

// ---------------------------------------------------------------------------

Strategy::Strategy(std::shared_ptr<const StrategyLayout> layout, double x)
    : layout_(std::move(layout)), x_(x) {
  buy_.assign(layout_->size(), 0.0);
  sell_.assign(layout_->size(), 0.0);
  validate();
}

Strategy::Strategy(std::shared_ptr<const StrategyLayout> layout, double x, std::vector<double> buy,
                   std::vector<double> sell)
    : layout_(std::move(layout)), x_(x), buy_(std::move(buy)), sell_(std::move(sell)) {
  validate();
}

void Strategy::validate() const {
  if (!layout_) throw ContractViolation("strategy: missing layout");
  if (!(x_ > 0.0) || !std::isfinite(x_)) throw ContractViolation("strategy: endowment must be positive");
  if (buy_.size() != layout_->size() || sell_.size() != layout_->size()) {
    throw ContractViolation("strategy: increment vectors do not match the layout");
  }
  for (std::size_t i = 0; i < buy_.size(); ++i) {
    if (!(buy_[i] >= 0.0) || !(sell_[i] >= 0.0) || !std::isfinite(buy_[i]) ||
        !std::isfinite(sell_[i])) {
      throw ContractViolation("strategy: increments must be finite and nonnegative");
    }
  }
}

void Strategy::set(std::size_t slot, double buy, double sell) {
  if (!(buy >= 0.0) || !(sell >= 0.0)) {
    throw ContractViolation("strategy: increments must be nonnegative");
  }
  buy_.at(slot) = buy;
  sell_.at(slot) = sell;
}

void Strategy::set_x(double x) {
  if (!(x > 0.0)) throw ContractViolation("strategy: endowment must be positive");
  x_ = x;
}

std::vector<double> Strategy::increments() const {
  std::vector<double> z(buy_);
  z.insert(z.end(), sell_.begin(), sell_.end());
  return z;
}

Strategy Strategy::from_increments(std::shared_ptr<const StrategyLayout> layout, double x,
                                   std::span<const double> z) {
  const std::size_t n = layout->size();
  if (z.size() != 2 * n) throw ContractViolation("from_increments: size mismatch");
  std::vector<double> b(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<double> s(z.begin() + static_cast<std::ptrdiff_t>(n), z.end());
  return Strategy(std::move(layout), x, std::move(b), std::move(s));
}

bool Strategy::has_trades() const noexcept {
  return std::any_of(buy_.begin(), buy_.end(), [](double v) { return v != 0.0; }) ||
         std::any_of(sell_.begin(), sell_.end(), [](double v) { return v != 0.0; });
}

LadlagPath Strategy::cumulative(std::size_t omega, const std::vector<double>& amounts) const {
  const auto& L = *layout_;
  const auto& times = L.event_times();
  const std::size_t ne = times.size();
  std::vector<PathEvent> ev(ne);
  std::vector<double> slopes(ne + 1, 0.0);
  for (std::size_t k = 0; k < ne; ++k) {
    ev[k].time = times[k];
    ev[k].left_jump = amounts[L.left_slot(k, omega)];
    const auto r = L.right_slot(k, omega);
    ev[k].right_jump = r == StrategyLayout::npos ? 0.0 : amounts[r];
  }
  if (L.continuous_trading()) {
    for (std::size_t j = 0; j <= ne; ++j) {
      const auto r = L.rate_slot(j, omega);
      if (r != StrategyLayout::npos) slopes[j] = amounts[r];
    }
  }
  return LadlagPath(L.horizon(), 0.0, amounts[L.initial_slot(omega)], std::move(ev),
                    std::move(slopes));
}

LadlagPath Strategy::purchases(std::size_t omega) const { return cumulative(omega, buy_); }
LadlagPath Strategy::sales(std::size_t omega) const { return cumulative(omega, sell_); }
LadlagPath Strategy::shares(std::size_t omega) const { return purchases(omega) - sales(omega); }

Strategy convex_combination(std::span<const Strategy> strategies, std::span<const double> weights) {
  if (strategies.empty() || strategies.size() != weights.size()) {
    throw ContractViolation("convex_combination: need one weight per strategy");
  }
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ContractViolation("convex_combination: weights must be nonnegative");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw ContractViolation("convex_combination: weights must sum to 1");

  const auto& layout = strategies.front().layout_ptr();
  const std::size_t n = layout->size();
  std::vector<double> b(n, 0.0), s(n, 0.0);
  double x = 0.0;
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    const auto& st = strategies[i];
    if (!st.layout().same_shape(*layout)) {
      throw ContractViolation("convex_combination: strategies use different layouts");
    }
    x += weights[i] * st.x();
    for (std::size_t j = 0; j < n; ++j) {
      b[j] += weights[i] * st.buy()[j];
      s[j] += weights[i] * st.sell()[j];
    }
  }
  // Keep a common endowment exact rather than re-summed.
  const double x0 = strategies.front().x();
  if (std::all_of(strategies.begin(), strategies.end(),
                  [x0](const Strategy& st) { return st.x() == x0; })) {
    x = x0;
  }
  return Strategy(layout, x, std::move(b), std::move(s));
}

}  // namespace tcr
