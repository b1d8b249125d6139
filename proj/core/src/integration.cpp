#include "tcrobust/integration.hpp"

#include <algorithm>
#include <cmath>

#include "tcrobust/errors.hpp"

namespace tcr {

namespace {

// Slope of the segment that starts at or contains (a, a+).
double slope_after(const LadlagPath& p, double a) {
  const auto& ev = p.events();
  auto it = std::upper_bound(ev.begin(), ev.end(), a,
                             [](double v, const PathEvent& e) { return v < e.time; });
  return p.slopes()[static_cast<std::size_t>(it - ev.begin())];
}

void require_integrable(const LadlagPath& S, const LadlagPath& H) {
  if (S.horizon() != H.horizon()) {
    throw ContractViolation("integrate: integrand and integrator horizons differ");
  }
  if (!S.is_cadlag()) throw ContractViolation("integrate: integrand must be càdlàg");
  if (!H.is_increasing()) throw ContractViolation("integrate: integrator must be increasing");
}

}  // namespace

double integrate(const LadlagPath& S, const LadlagPath& H, double s, double t) {
  require_integrable(S, H);
  if (!(s >= 0.0 && s < t && t <= H.horizon())) {
    throw DomainError("integrate: need 0 <= s < t <= T");
  }

  std::vector<double> cuts{s, t};
  for (double k : S.knot_times()) {
    if (k > s && k < t) cuts.push_back(k);
  }
  for (double k : H.knot_times()) {
    if (k > s && k < t) cuts.push_back(k);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    const double rate = slope_after(H, a);
    if (rate == 0.0) continue;
    total += rate * 0.5 * (S.right_limit_at(a) + S.left_limit_at(b)) * (b - a);
  }

  if (s == 0.0) total += S.value_at(0.0) * H.initial_right_jump();
  for (const auto& e : H.events()) {
    if (e.time > s && e.time <= t && e.left_jump != 0.0) {
      total += S.left_limit_at(e.time) * e.left_jump;
    }
    if (e.time >= s && e.time < t && e.right_jump != 0.0) {
      total += S.value_at(e.time) * e.right_jump;
    }
  }
  return total;
}

double integrate(const LadlagPath& S, const LadlagPath& H_inc) {
  return integrate(S, H_inc, 0.0, H_inc.horizon());
}

double integrate_signed(const LadlagPath& S, const LadlagPath& H, double s, double t) {
  const auto jh = jordan_hahn(H);
  return integrate(S, jh.up, s, t) - integrate(S, jh.down, s, t);
}

Flattened flatten_eps(const LadlagPath& S, double eps) {
  if (!(eps > 0.0)) throw DomainError("flatten_eps: eps must be positive");
  std::vector<PathEvent> ev = S.events();
  std::vector<BigJump> big;
  for (auto& e : ev) {
    if (std::abs(e.left_jump) >= eps) {
      big.push_back({e.time, e.left_jump});
      e.left_jump = 0.0;
    }
  }
  return {LadlagPath(S.horizon(), S.initial_value(), S.initial_right_jump(), std::move(ev),
                     S.slopes()),
          std::move(big)};
}

LadlagPath big_jump_steps(const std::vector<BigJump>& jumps, double horizon) {
  std::vector<PathEvent> ev;
  ev.reserve(jumps.size());
  for (const auto& j : jumps) ev.push_back({j.time, j.size, 0.0});
  std::sort(ev.begin(), ev.end(),
            [](const PathEvent& a, const PathEvent& b) { return a.time < b.time; });
  std::vector<double> zeros(ev.size() + 1, 0.0);
  return LadlagPath(horizon, 0.0, 0.0, std::move(ev), std::move(zeros));
}

double StepPath::value_at(double t) const {
  if (!(t >= 0.0 && t <= horizon)) throw DomainError("StepPath::value_at: time outside [0, T]");
  if (t == 0.0) return levels.front();
  // Last sigma strictly before t.
  auto it = std::lower_bound(times.begin(), times.end(), t);
  return levels[static_cast<std::size_t>(it - times.begin()) - 1];
}

StepPath step_approximation(const LadlagPath& S, double eps) {
  if (!(eps > 0.0)) throw DomainError("step_approximation: eps must be positive");
  if (!S.is_cadlag()) throw ContractViolation("step_approximation: path must be càdlàg");
  for (const auto& e : S.events()) {
    if (std::abs(e.left_jump) >= eps) {
      throw ContractViolation("step_approximation: all jumps must be smaller than eps");
    }
  }

  const double T = S.horizon();
  StepPath out;
  out.horizon = T;
  out.times.push_back(0.0);
  out.levels.push_back(S.value_at(0.0));

  const auto& ev = S.events();
  double level = out.levels.back();
  double pos = 0.0;       // current scan position
  double pos_value = level;
  std::size_t seg = 0;    // segment containing (pos, pos+)
  while (true) {
    const double seg_end = seg < ev.size() ? ev[seg].time : T;
    const double slope = S.slopes()[seg];
    const double end_left = pos_value + slope * (seg_end - pos);
    if (seg_end > pos && std::abs(end_left - level) > eps) {
      // Linear crossing of the band [level - eps, level + eps] inside the segment.
      const double target = end_left > level ? level + eps : level - eps;
      double cross = pos + (target - pos_value) / slope;
      if (!(cross > pos)) cross = std::nextafter(pos, T);
      if (cross >= T) break;
      out.times.push_back(cross);
      level = S.value_at(cross);
      out.levels.push_back(level);
      pos = cross;
      pos_value = level;
      continue;
    }
    if (seg >= ev.size()) break;
    const double jump_value = S.value_at(seg_end);
    if (seg_end < T && std::abs(jump_value - level) > eps) {
      out.times.push_back(seg_end);
      level = jump_value;
      out.levels.push_back(level);
    }
    pos = seg_end;
    pos_value = jump_value;
    ++seg;
    if (pos >= T) break;
  }
  return out;
}

double integrate_step(const StepPath& step, const LadlagPath& H, double t) {
  if (!(t >= 0.0 && t <= H.horizon())) throw DomainError("integrate_step: time outside [0, T]");
  double total = 0.0;
  const std::size_t m = step.times.size();
  for (std::size_t i = 1; i <= m; ++i) {
    const double lo = std::min(step.times[i - 1], t);
    const double hi = std::min(i < m ? step.times[i] : step.horizon, t);
    if (hi <= lo) continue;
    total += step.levels[i - 1] * (H.value_at(hi) - H.value_at(lo));
  }
  return total;
}

CertifiedIntegral certified_integral(const LadlagPath& S, const LadlagPath& H, double eps) {
  require_integrable(S, H);
  const auto flat = flatten_eps(S, eps);
  const auto step = step_approximation(flat.flattened, eps);
  const double T = H.horizon();
  double value = integrate_step(step, H, T);
  const double H_T = H.value_at(T);
  for (const auto& j : flat.big_jumps) value += j.size * (H_T - H.value_at(j.time));
  return {value, 4.0 * eps * total_variation(H, T)};
}

}  // namespace tcr
