#pragma once

#include <vector>

#include "tcrobust/paths.hpp"

namespace tcr {

/// Pathwise Stieltjes integral of a càdlàg integrand S against an increasing
/// integrator H over [s, t]:
///
///   int_s^t S dH = int_s^t S dH^c + sum_{s < u <= t} S_{u-} dH_u
///                                 + sum_{s <= u < t} S_u d+H_u
///
/// Left jumps of H are priced at the left limit of S, right jumps at the
/// value of S. The continuous part is integrated exactly segment by segment
/// (S is linear and H^c has constant slope on each merged segment).
///
/// Throws ContractViolation when S is not càdlàg or H is not increasing,
/// DomainError unless 0 <= s < t <= T.
double integrate(const LadlagPath& S, const LadlagPath& H_inc, double s, double t);

/// Same as integrate(S, H, 0, T).
double integrate(const LadlagPath& S, const LadlagPath& H_inc);

/// int S dH for a general finite-variation H, via its Jordan-Hahn parts.
double integrate_signed(const LadlagPath& S, const LadlagPath& H, double s, double t);

struct BigJump {
  double time = 0.0;
  double size = 0.0;
};

struct Flattened {
  LadlagPath flattened;          // S with every jump of size >= eps removed
  std::vector<BigJump> big_jumps;
};

/// Removes the left jumps with |dS| >= eps. S equals the flattened path plus
/// sum_i size_i * 1_{[time_i, T]}.
Flattened flatten_eps(const LadlagPath& S, double eps);

/// sum_i size_i * 1_{[time_i, T]} as a path on [0, horizon].
LadlagPath big_jump_steps(const std::vector<BigJump>& jumps, double horizon);

/// Left-continuous step function: level[0] at 0, level[i-1] on
/// (times[i-1], times[i]] with times[m] := horizon.
struct StepPath {
  double horizon = 0.0;
  std::vector<double> times;   // sigma_0 = 0 < sigma_1 < ... < sigma_{m-1} < T
  std::vector<double> levels;  // S at each sigma_i

  double value_at(double t) const;
};

/// Step approximation of a path whose jumps are all below eps. A new level
/// starts the first time the path moves more than eps away from the current
/// one, so the sup distance to the path is at most 2 * eps.
StepPath step_approximation(const LadlagPath& S_eps, double eps);

/// int_0^t step dH computed as sum_i level_{i-1} (H_{sigma_i ^ t} - H_{sigma_{i-1} ^ t}).
double integrate_step(const StepPath& step, const LadlagPath& H_inc, double t);

struct CertifiedIntegral {
  double value = 0.0;
  double error_bound = 0.0;
};

/// Approximates int_0^T S dH with the flatten / step construction: the big
/// jumps are integrated exactly and the flattened remainder through its step
/// approximation. The returned bound 4 * eps * |H|_T dominates the error.
CertifiedIntegral certified_integral(const LadlagPath& S, const LadlagPath& H_inc, double eps);

}  // namespace tcr
