#include "tcrobust/paths.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tcrobust/errors.hpp"

namespace tcr {

std::string_view to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::Left:
      return "left";
    case LimitKind::Value:
      return "value";
    case LimitKind::Right:
      return "right";
  }
  return "?";
}

LadlagPath::LadlagPath(double horizon, double initial_value,
                       double initial_right_jump, std::vector<PathEvent> events,
                       std::vector<double> slopes)
    : horizon_(horizon),
      initial_value_(initial_value),
      initial_right_jump_(initial_right_jump),
      events_(std::move(events)),
      slopes_(std::move(slopes)) {
  validate();
  build_knots();
}

LadlagPath::LadlagPath(Cached, double horizon, double initial_value,
                       double initial_right_jump, std::vector<PathEvent> events,
                       std::vector<double> slopes,
                       std::vector<KnotValues> knots, double terminal_value)
    : horizon_(horizon),
      initial_value_(initial_value),
      initial_right_jump_(initial_right_jump),
      events_(std::move(events)),
      slopes_(std::move(slopes)),
      knots_(std::move(knots)),
      terminal_value_(terminal_value) {
  validate();
}

LadlagPath LadlagPath::constant(double horizon, double value) {
  return LadlagPath(horizon, value, 0.0, {}, {0.0});
}

LadlagPath LadlagPath::from_knots(double horizon, double initial_value,
                                  double initial_right_limit,
                                  std::span<const KnotValues> knots,
                                  double terminal_value) {
  std::vector<PathEvent> events;
  std::vector<double> slopes;
  events.reserve(knots.size());
  slopes.reserve(knots.size() + 1);
  double prev_time = 0.0;
  double prev_right = initial_right_limit;
  for (const auto& k : knots) {
    const double dt = k.time - prev_time;
    if (!(dt > 0.0)) {
      throw ContractViolation("from_knots: knot times must be strictly increasing in (0, T]");
    }
    slopes.push_back((k.left - prev_right) / dt);
    events.push_back({k.time, k.value - k.left, k.right - k.value});
    prev_time = k.time;
    prev_right = k.right;
  }
  double terminal = terminal_value;
  if (prev_time < horizon) {
    slopes.push_back((terminal_value - prev_right) / (horizon - prev_time));
  } else {
    slopes.push_back(0.0);
    terminal = knots.back().value;
  }
  std::vector<KnotValues> cached(knots.begin(), knots.end());
  return LadlagPath(Cached{}, horizon, initial_value,
                    initial_right_limit - initial_value, std::move(events),
                    std::move(slopes), std::move(cached), terminal);
}

void LadlagPath::validate() const {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw ContractViolation("LadlagPath: horizon must be positive and finite");
  }
  if (!std::isfinite(initial_value_) || !std::isfinite(initial_right_jump_)) {
    throw ContractViolation("LadlagPath: initial value and jump must be finite");
  }
  if (slopes_.size() != events_.size() + 1) {
    std::ostringstream os;
    os << "LadlagPath: expected " << events_.size() + 1 << " slopes, got "
       << slopes_.size();
    throw ContractViolation(os.str());
  }
  double prev = 0.0;
  for (const auto& e : events_) {
    if (!(e.time > prev) || e.time > horizon_) {
      throw ContractViolation("LadlagPath: event times must be strictly increasing in (0, T]");
    }
    if (!std::isfinite(e.left_jump) || !std::isfinite(e.right_jump)) {
      throw ContractViolation("LadlagPath: jumps must be finite");
    }
    if (e.time == horizon_ && e.right_jump != 0.0) {
      throw ContractViolation("LadlagPath: right jump at the horizon is not allowed");
    }
    prev = e.time;
  }
  for (double s : slopes_) {
    if (!std::isfinite(s)) throw ContractViolation("LadlagPath: slopes must be finite");
  }
}

void LadlagPath::build_knots() {
  knots_.clear();
  knots_.reserve(events_.size());
  double prev_time = 0.0;
  double prev_right = initial_value_ + initial_right_jump_;
  for (std::size_t k = 0; k < events_.size(); ++k) {
    const auto& e = events_[k];
    KnotValues kv;
    kv.time = e.time;
    kv.left = prev_right + slopes_[k] * (e.time - prev_time);
    kv.value = kv.left + e.left_jump;
    kv.right = kv.value + e.right_jump;
    knots_.push_back(kv);
    prev_time = e.time;
    prev_right = kv.right;
  }
  if (prev_time < horizon_) {
    terminal_value_ = prev_right + slopes_.back() * (horizon_ - prev_time);
  } else {
    terminal_value_ = knots_.back().value;
  }
}

std::vector<double> LadlagPath::knot_times() const {
  std::vector<double> out;
  out.reserve(events_.size() + 2);
  out.push_back(0.0);
  for (const auto& e : events_) out.push_back(e.time);
  if (events_.empty() || events_.back().time < horizon_) out.push_back(horizon_);
  return out;
}

std::ptrdiff_t LadlagPath::event_index(double t) const {
  auto it = std::lower_bound(events_.begin(), events_.end(), t,
                             [](const PathEvent& e, double v) { return e.time < v; });
  if (it != events_.end() && it->time == t) return it - events_.begin();
  return -1;
}

double LadlagPath::segment_start(std::size_t j) const {
  return j == 0 ? 0.0 : events_[j - 1].time;
}

double LadlagPath::segment_length(std::size_t j) const {
  const double end = j < events_.size() ? events_[j].time : horizon_;
  return end - segment_start(j);
}

double LadlagPath::interior_value(double t) const {
  // Segment containing t: number of events strictly before t.
  auto it = std::lower_bound(events_.begin(), events_.end(), t,
                             [](const PathEvent& e, double v) { return e.time < v; });
  const std::size_t j = static_cast<std::size_t>(it - events_.begin());
  const double start = segment_start(j);
  const double base = j == 0 ? initial_value_ + initial_right_jump_ : knots_[j - 1].right;
  return base + slopes_[j] * (t - start);
}

double LadlagPath::value_at(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    throw DomainError("value_at: time outside [0, T]");
  }
  if (t == 0.0) return initial_value_;
  const auto k = event_index(t);
  if (k >= 0) return knots_[static_cast<std::size_t>(k)].value;
  if (t == horizon_) return terminal_value_;
  return interior_value(t);
}

double LadlagPath::left_limit_at(double t) const {
  if (!(t > 0.0 && t <= horizon_)) {
    throw DomainError("left_limit_at: time outside (0, T]");
  }
  const auto k = event_index(t);
  if (k >= 0) return knots_[static_cast<std::size_t>(k)].left;
  if (t == horizon_) return terminal_value_;
  return interior_value(t);
}

double LadlagPath::right_limit_at(double t) const {
  if (!(t >= 0.0 && t < horizon_)) {
    throw DomainError("right_limit_at: time outside [0, T)");
  }
  if (t == 0.0) return initial_value_ + initial_right_jump_;
  const auto k = event_index(t);
  if (k >= 0) return knots_[static_cast<std::size_t>(k)].right;
  return interior_value(t);
}

double LadlagPath::at(double t, LimitKind kind) const {
  switch (kind) {
    case LimitKind::Left:
      return left_limit_at(t);
    case LimitKind::Value:
      return value_at(t);
    case LimitKind::Right:
      return right_limit_at(t);
  }
  return value_at(t);
}

double LadlagPath::left_jump_at(double t) const {
  const auto k = event_index(t);
  return k >= 0 ? events_[static_cast<std::size_t>(k)].left_jump : 0.0;
}

double LadlagPath::right_jump_at(double t) const {
  if (t == 0.0) return initial_right_jump_;
  const auto k = event_index(t);
  return k >= 0 ? events_[static_cast<std::size_t>(k)].right_jump : 0.0;
}

bool LadlagPath::is_cadlag() const noexcept {
  if (initial_right_jump_ != 0.0) return false;
  return std::all_of(events_.begin(), events_.end(),
                     [](const PathEvent& e) { return e.right_jump == 0.0; });
}

bool LadlagPath::is_increasing() const noexcept {
  if (initial_right_jump_ < 0.0) return false;
  for (const auto& e : events_) {
    if (e.left_jump < 0.0 || e.right_jump < 0.0) return false;
  }
  for (std::size_t j = 0; j < slopes_.size(); ++j) {
    if (slopes_[j] < 0.0 && segment_length(j) > 0.0) return false;
  }
  return true;
}

LadlagPath LadlagPath::refined(std::span<const double> times) const {
  std::vector<double> all;
  all.reserve(events_.size() + times.size());
  for (const auto& e : events_) all.push_back(e.time);
  for (double t : times) {
    if (!(t > 0.0 && t <= horizon_)) {
      throw ContractViolation("refined: times must lie in (0, T]");
    }
    all.push_back(t);
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  if (all.size() == events_.size()) return *this;

  std::vector<PathEvent> ev;
  std::vector<double> sl;
  std::vector<KnotValues> kn;
  ev.reserve(all.size());
  sl.reserve(all.size() + 1);
  kn.reserve(all.size());
  std::size_t src = 0;  // index of the next original event
  for (double t : all) {
    sl.push_back(slopes_[src]);
    if (src < events_.size() && events_[src].time == t) {
      ev.push_back(events_[src]);
      kn.push_back(knots_[src]);
      ++src;
    } else {
      const double v = interior_value(t);
      ev.push_back({t, 0.0, 0.0});
      kn.push_back({t, v, v, v});
    }
  }
  sl.push_back(slopes_[src]);
  return LadlagPath(Cached{}, horizon_, initial_value_, initial_right_jump_,
                    std::move(ev), std::move(sl), std::move(kn), terminal_value_);
}

namespace {

std::vector<double> event_times(const LadlagPath& p) {
  std::vector<double> out;
  out.reserve(p.events().size());
  for (const auto& e : p.events()) out.push_back(e.time);
  return out;
}

LadlagPath combine(const LadlagPath& a, const LadlagPath& b, double ca, double cb) {
  if (a.horizon() != b.horizon()) {
    throw ContractViolation("path arithmetic: horizons differ");
  }
  const auto ta = event_times(a);
  const auto tb = event_times(b);
  const LadlagPath ra = a.refined(tb);
  const LadlagPath rb = b.refined(ta);
  std::vector<PathEvent> ev(ra.events().size());
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const auto& x = ra.events()[i];
    const auto& y = rb.events()[i];
    ev[i] = {x.time, ca * x.left_jump + cb * y.left_jump,
             ca * x.right_jump + cb * y.right_jump};
  }
  std::vector<double> sl(ra.slopes().size());
  for (std::size_t j = 0; j < sl.size(); ++j) {
    sl[j] = ca * ra.slopes()[j] + cb * rb.slopes()[j];
  }
  return LadlagPath(a.horizon(), ca * a.initial_value() + cb * b.initial_value(),
                    ca * a.initial_right_jump() + cb * b.initial_right_jump(),
                    std::move(ev), std::move(sl));
}

}  // namespace

LadlagPath operator+(const LadlagPath& a, const LadlagPath& b) { return combine(a, b, 1.0, 1.0); }

LadlagPath operator-(const LadlagPath& a, const LadlagPath& b) { return combine(a, b, 1.0, -1.0); }

LadlagPath operator*(double c, const LadlagPath& a) {
  std::vector<PathEvent> ev = a.events();
  for (auto& e : ev) {
    e.left_jump *= c;
    e.right_jump *= c;
  }
  std::vector<double> sl = a.slopes();
  for (auto& s : sl) s *= c;
  return LadlagPath(a.horizon(), c * a.initial_value(), c * a.initial_right_jump(),
                    std::move(ev), std::move(sl));
}

LadlagPath shifted(const LadlagPath& a, double c) {
  return LadlagPath(a.horizon(), a.initial_value() + c, a.initial_right_jump(),
                    a.events(), a.slopes());
}

JordanHahn jordan_hahn(const LadlagPath& path) {
  const auto pos = [](double v) { return v > 0.0 ? v : 0.0; };
  const auto neg = [](double v) { return v < 0.0 ? -v : 0.0; };
  std::vector<PathEvent> up_ev, down_ev;
  up_ev.reserve(path.events().size());
  down_ev.reserve(path.events().size());
  for (const auto& e : path.events()) {
    up_ev.push_back({e.time, pos(e.left_jump), pos(e.right_jump)});
    down_ev.push_back({e.time, neg(e.left_jump), neg(e.right_jump)});
  }
  std::vector<double> up_sl, down_sl;
  for (std::size_t j = 0; j < path.slopes().size(); ++j) {
    // Slopes on empty segments carry no variation.
    const double s = path.segment_length(j) > 0.0 ? path.slopes()[j] : 0.0;
    up_sl.push_back(pos(s));
    down_sl.push_back(neg(s));
  }
  const double irj = path.initial_right_jump();
  return {LadlagPath(path.horizon(), 0.0, pos(irj), std::move(up_ev), std::move(up_sl)),
          LadlagPath(path.horizon(), 0.0, neg(irj), std::move(down_ev), std::move(down_sl))};
}

PathParts decompose_parts(const LadlagPath& path) {
  const double T = path.horizon();
  std::vector<PathEvent> cont_ev, left_ev, right_ev;
  for (const auto& e : path.events()) {
    cont_ev.push_back({e.time, 0.0, 0.0});
    left_ev.push_back({e.time, e.left_jump, 0.0});
    right_ev.push_back({e.time, e.right_jump, 0.0});
  }
  std::vector<double> zeros(path.slopes().size(), 0.0);
  return {LadlagPath(T, 0.0, 0.0, std::move(cont_ev), path.slopes()),
          LadlagPath(T, 0.0, 0.0, std::move(left_ev), zeros),
          LadlagPath(T, path.initial_right_jump(), 0.0, std::move(right_ev), zeros)};
}

double total_variation(const LadlagPath& path, double t) {
  const auto jh = jordan_hahn(path);
  return jh.up.value_at(t) + jh.down.value_at(t);
}

double total_variation(const LadlagPath& path) { return total_variation(path, path.horizon()); }

}  // namespace tcr
