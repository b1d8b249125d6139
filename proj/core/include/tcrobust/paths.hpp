#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace tcr {

/// Which one-sided limit of a làdlàg path is meant at a time t.
enum class LimitKind { Left, Value, Right };

std::string_view to_string(LimitKind kind);

struct PathEvent {
  double time = 0.0;
  double left_jump = 0.0;   // H_t - H_{t-}
  double right_jump = 0.0;  // H_{t+} - H_t
};

/// Knot values of a path at one time: (H_{t-}, H_t, H_{t+}).
struct KnotValues {
  double time = 0.0;
  double left = 0.0;
  double value = 0.0;
  double right = 0.0;
};

/// Finite-variation path on [0, T] with finitely many left and right jumps and
/// a piecewise-linear continuous part.
///
/// Segment j runs from knot j to knot j+1, where knot 0 is time 0, knots
/// 1..n are the event times and knot n+1 is T. When the last event sits at T
/// the final segment has length zero and its slope is ignored. Event times are
/// compared exactly. A right jump at T is rejected and there is no left jump
/// at time 0.
///
/// Instances are immutable.
class LadlagPath {
 public:
  LadlagPath(double horizon, double initial_value, double initial_right_jump,
             std::vector<PathEvent> events, std::vector<double> slopes);

  static LadlagPath constant(double horizon, double value);

  /// Builds a path that interpolates linearly between the given knots.
  /// `knots` must have strictly increasing times in (0, T]. If the last knot
  /// lies before T, `terminal_value` is the value at T.
  static LadlagPath from_knots(double horizon, double initial_value,
                               double initial_right_limit,
                               std::span<const KnotValues> knots,
                               double terminal_value = 0.0);

  double horizon() const noexcept { return horizon_; }
  double initial_value() const noexcept { return initial_value_; }
  double initial_right_jump() const noexcept { return initial_right_jump_; }
  const std::vector<PathEvent>& events() const noexcept { return events_; }
  const std::vector<double>& slopes() const noexcept { return slopes_; }

  /// Times 0, e_1, ..., e_n and T (T not repeated when it is an event).
  std::vector<double> knot_times() const;

  double value_at(double t) const;
  double left_limit_at(double t) const;
  double right_limit_at(double t) const;
  double at(double t, LimitKind kind) const;

  /// Jump sizes at t; zero away from events.
  double left_jump_at(double t) const;
  double right_jump_at(double t) const;

  /// Value and limits at event i (0-based).
  const KnotValues& event_knot(std::size_t i) const { return knots_[i]; }
  /// Value right after time 0.
  double right_limit_at_zero() const noexcept {
    return initial_value_ + initial_right_jump_;
  }
  double terminal_value() const noexcept { return terminal_value_; }

  /// Start of segment j (0 or the preceding event time) and its length.
  double segment_start(std::size_t j) const;
  double segment_length(std::size_t j) const;

  /// True when every right jump (including the one at 0) is zero.
  bool is_cadlag() const noexcept;
  /// True when every jump and slope is >= 0.
  bool is_increasing() const noexcept;

  /// Equivalent path whose event set is the union with `times`
  /// (all in (0, T]); inserted events carry zero jumps.
  LadlagPath refined(std::span<const double> times) const;

 private:
  struct Cached {};
  LadlagPath(Cached, double horizon, double initial_value,
             double initial_right_jump, std::vector<PathEvent> events,
             std::vector<double> slopes, std::vector<KnotValues> knots,
             double terminal_value);

  void validate() const;
  void build_knots();
  // Index of the event at exactly t, or -1.
  std::ptrdiff_t event_index(double t) const;
  double interior_value(double t) const;

  double horizon_;
  double initial_value_;
  double initial_right_jump_;
  std::vector<PathEvent> events_;
  std::vector<double> slopes_;
  std::vector<KnotValues> knots_;
  double terminal_value_ = 0.0;
};

LadlagPath operator+(const LadlagPath& a, const LadlagPath& b);
LadlagPath operator-(const LadlagPath& a, const LadlagPath& b);
LadlagPath operator*(double c, const LadlagPath& a);
/// Adds a constant to every value.
LadlagPath shifted(const LadlagPath& a, double c);

struct JordanHahn {
  LadlagPath up;
  LadlagPath down;
};

/// Minimal split H = H_0 + up - down into increasing paths starting at 0.
JordanHahn jordan_hahn(const LadlagPath& path);

struct PathParts {
  LadlagPath continuous;  // starts at 0, no jumps
  LadlagPath left_part;   // sum of left jumps up to and including t
  LadlagPath right_part;  // sum of right jumps up to and including t (càdlàg)
};

/// Splits H into continuous, left-jump and right-jump parts with
/// H_t = H_0 + continuous_t + left_part_t + right_part_{t-}
/// (right_part_{0-} taken as 0).
PathParts decompose_parts(const LadlagPath& path);

/// |H|_t, the total variation on [0, t] evaluated at the value H_t.
double total_variation(const LadlagPath& path, double t);
double total_variation(const LadlagPath& path);

}  // namespace tcr
