#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcrobust/paths.hpp"

namespace tcr {

/// Cells of scenario indices; disjoint and covering all scenarios.
using Partition = std::vector<std::vector<std::size_t>>;

struct TreeEvent {
  double time = 0.0;
  Partition pre;   // information available just before the event (F_{t-})
  Partition post;  // information at the event (F_t)
};

/// Finite filtered probability space. The information partitions refine
/// monotonically: root <= pre_1 <= post_1 <= pre_2 <= ... <= post_n, and the
/// filtration is constant between events.
///
/// "Layer" k denotes the information in force on [e_k, e_{k+1}): layer 0 is
/// the root partition, layer k >= 1 is post_k.
class ScenarioTree {
 public:
  ScenarioTree(std::vector<std::string> labels, std::vector<double> probabilities,
               double horizon, Partition root, std::vector<TreeEvent> events);

  /// Single-cell root with the given events.
  static ScenarioTree with_trivial_root(std::vector<std::string> labels,
                                        std::vector<double> probabilities, double horizon,
                                        std::vector<TreeEvent> events);

  std::size_t num_scenarios() const noexcept { return labels_.size(); }
  std::size_t num_events() const noexcept { return events_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  double probability(std::size_t omega) const { return probs_.at(omega); }
  const std::vector<double>& probabilities() const noexcept { return probs_; }
  double horizon() const noexcept { return horizon_; }
  const Partition& root() const noexcept { return root_; }
  const std::vector<TreeEvent>& events() const noexcept { return events_; }
  std::vector<double> event_times() const;

  const Partition& layer(std::size_t k) const;
  std::size_t num_layers() const noexcept { return events_.size() + 1; }

  std::size_t root_cell(std::size_t omega) const { return root_cell_.at(omega); }
  std::size_t pre_cell(std::size_t event, std::size_t omega) const {
    return pre_cell_.at(event).at(omega);
  }
  std::size_t post_cell(std::size_t event, std::size_t omega) const {
    return post_cell_.at(event).at(omega);
  }
  std::size_t layer_cell(std::size_t k, std::size_t omega) const {
    return k == 0 ? root_cell(omega) : post_cell(k - 1, omega);
  }

  double cell_probability(const std::vector<std::size_t>& cell) const;

  /// True when the last event is at the horizon.
  bool event_at_horizon() const noexcept {
    return !events_.empty() && events_.back().time == horizon_;
  }

  std::optional<std::size_t> scenario_index(const std::string& label) const;

 private:
  std::vector<std::string> labels_;
  std::vector<double> probs_;
  double horizon_;
  Partition root_;
  std::vector<TreeEvent> events_;
  std::vector<std::size_t> root_cell_;
  std::vector<std::vector<std::size_t>> pre_cell_;
  std::vector<std::vector<std::size_t>> post_cell_;
};

/// Maps a partition to per-scenario cell indices; throws ContractViolation
/// unless the cells are nonempty, disjoint and cover {0, ..., n-1}.
std::vector<std::size_t> cell_index(const Partition& partition, std::size_t n);

/// True when every cell of `fine` lies inside a cell of `coarse`.
bool refines(const Partition& fine, const Partition& coarse, std::size_t n);

struct PriceModel {
  std::string label;
  std::vector<LadlagPath> paths;  // one càdlàg price path per scenario
};

/// Adapted, strictly positive price models on a common scenario tree with
/// proportional cost lambda.
class ModelFamily {
 public:
  ModelFamily(ScenarioTree tree, std::vector<PriceModel> models, double lambda,
              std::optional<double> lambda_prime = std::nullopt);

  const ScenarioTree& tree() const noexcept { return tree_; }
  const std::vector<PriceModel>& models() const noexcept { return models_; }
  std::size_t num_models() const noexcept { return models_.size(); }
  double lambda() const noexcept { return lambda_; }
  std::optional<double> lambda_prime() const noexcept { return lambda_prime_; }

  const LadlagPath& price(std::size_t theta, std::size_t omega) const {
    return models_.at(theta).paths.at(omega);
  }

  /// The same models and tree at another cost level.
  ModelFamily with_lambda(double lambda) const;
  /// Subfamily holding only model theta.
  ModelFamily single(std::size_t theta) const;

  std::optional<std::size_t> model_index(const std::string& label) const;

 private:
  void validate() const;

  ScenarioTree tree_;
  std::vector<PriceModel> models_;
  double lambda_;
  std::optional<double> lambda_prime_;
};

enum class SlotKind {
  Initial,  // right jump at time 0, root cells
  Left,     // left jump at event k, pre_k cells
  Right,    // right jump at event k < T, post_k cells
  Rate,     // continuous trading on interval j, layer_j cells
};

std::string_view to_string(SlotKind kind);

struct TradeSlot {
  SlotKind kind = SlotKind::Initial;
  std::size_t index = 0;  // event index (Left/Right) or interval index (Rate)
  std::size_t cell = 0;
  double time = 0.0;      // trade time; interval start for Rate
};

/// Enumerates the decision variables of a predictable strategy on a tree.
/// Predictability is structural: each slot is keyed by the information cell
/// its trade may depend on.
class StrategyLayout {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  explicit StrategyLayout(const ScenarioTree& tree, bool continuous_trading = false);

  std::size_t size() const noexcept { return slots_.size(); }
  const std::vector<TradeSlot>& slots() const noexcept { return slots_; }
  const TradeSlot& slot(std::size_t i) const { return slots_.at(i); }
  bool continuous_trading() const noexcept { return continuous_; }
  std::size_t num_scenarios() const noexcept { return root_cell_.size(); }
  double horizon() const noexcept { return horizon_; }
  const std::vector<double>& event_times() const noexcept { return event_times_; }

  std::size_t initial_slot(std::size_t omega) const;
  std::size_t left_slot(std::size_t event, std::size_t omega) const;
  std::size_t right_slot(std::size_t event, std::size_t omega) const;  // npos at T
  std::size_t rate_slot(std::size_t interval, std::size_t omega) const;  // npos if none

  /// Whether two layouts describe the same slots on the same tree.
  bool same_shape(const StrategyLayout& other) const;

 private:
  bool continuous_;
  double horizon_;
  std::vector<double> event_times_;
  std::vector<TradeSlot> slots_;
  std::vector<std::size_t> root_cell_;
  std::vector<std::vector<std::size_t>> left_, right_, rate_;  // [event][omega] -> slot
};

/// Predictable finite-variation share process H^1 with endowment (x, 0),
/// stored as nonnegative buy and sell amounts (rates for Rate slots) per
/// slot. Simultaneous buying and selling in one slot is allowed and simply
/// burns cash.
class Strategy {
 public:
  Strategy(std::shared_ptr<const StrategyLayout> layout, double x);
  Strategy(std::shared_ptr<const StrategyLayout> layout, double x, std::vector<double> buy,
           std::vector<double> sell);

  const StrategyLayout& layout() const noexcept { return *layout_; }
  const std::shared_ptr<const StrategyLayout>& layout_ptr() const noexcept { return layout_; }
  double x() const noexcept { return x_; }
  const std::vector<double>& buy() const noexcept { return buy_; }
  const std::vector<double>& sell() const noexcept { return sell_; }

  void set(std::size_t slot, double buy, double sell);
  void set_x(double x);

  /// [buy_0, ..., buy_{n-1}, sell_0, ..., sell_{n-1}].
  std::vector<double> increments() const;
  static Strategy from_increments(std::shared_ptr<const StrategyLayout> layout, double x,
                                  std::span<const double> z);

  bool has_trades() const noexcept;

  /// Per-scenario cumulative purchases, sales and net position H^1.
  LadlagPath purchases(std::size_t omega) const;
  LadlagPath sales(std::size_t omega) const;
  LadlagPath shares(std::size_t omega) const;

 private:
  LadlagPath cumulative(std::size_t omega, const std::vector<double>& amounts) const;
  void validate() const;

  std::shared_ptr<const StrategyLayout> layout_;
  double x_;
  std::vector<double> buy_;
  std::vector<double> sell_;
};

/// sum_i w_i * s_i with w on the simplex; all strategies share a layout.
Strategy convex_combination(std::span<const Strategy> strategies, std::span<const double> weights);

}  // namespace tcr
