#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "tcrobust/errors.hpp"
#include "tcrobust/integration.hpp"

namespace tcr {
namespace {

using testing::Rng;

LadlagPath random_cadlag(Rng& rng, double scale = 1.0) {
  testing::PathOptions o;
  o.right_jumps = false;
  o.scale = scale;
  return testing::random_path(rng, 1.0, o);
}

LadlagPath random_increasing(Rng& rng, bool slopes = true) {
  testing::PathOptions o;
  o.increasing = true;
  o.slopes = slopes;
  return testing::random_path(rng, 1.0, o);
}

TEST(Integration, UnitIntegrand) {
  const auto S = LadlagPath::constant(2.0, 1.0);
  const LadlagPath H(2.0, 0.0, 0.0, {{1.0, 2.0, 3.0}}, {0.0, 0.0});
  EXPECT_EQ(integrate(S, H, 0.0, 2.0), 5.0);
}

TEST(Integration, LeftJumpsAtLeftLimitRightJumpsAtValue) {
  const LadlagPath S(2.0, 4.0, 0.0, {{1.0, 2.0, 0.0}}, {0.0, 0.0});
  const LadlagPath H(2.0, 0.0, 0.0, {{1.0, 1.0, 1.0}}, {0.0, 0.0});
  EXPECT_EQ(integrate(S, H, 0.0, 2.0), 10.0);
}

TEST(Integration, BoundsConvention) {
  // Left jump at s excluded, right jump at s included; the reverse at t.
  const auto S = LadlagPath::constant(3.0, 1.0);
  const LadlagPath H(3.0, 0.0, 0.0, {{1.0, 1.0, 10.0}, {2.0, 100.0, 1000.0}}, {0.0, 0.0, 0.0});
  EXPECT_EQ(integrate(S, H, 1.0, 2.0), 110.0);
}

TEST(Integration, Contracts) {
  const auto S = LadlagPath::constant(1.0, 1.0);
  const LadlagPath down(1.0, 0.0, 0.0, {{0.5, -1.0, 0.0}}, {0.0, 0.0});
  EXPECT_THROW(integrate(S, down, 0.0, 1.0), ContractViolation);
  const LadlagPath not_cadlag(1.0, 1.0, 0.0, {{0.5, 0.0, 1.0}}, {0.0, 0.0});
  EXPECT_THROW(integrate(not_cadlag, LadlagPath::constant(1.0, 0.0), 0.0, 1.0), ContractViolation);
  EXPECT_THROW(integrate(S, LadlagPath::constant(1.0, 0.0), 0.5, 0.5), DomainError);
  EXPECT_THROW(integrate(S, LadlagPath::constant(1.0, 0.0), 0.0, 1.5), DomainError);
}

TEST(Integration, PiecewiseConstantAgainstPureJumpMatchesOracle) {
  Rng rng(21);
  for (int rep = 0; rep < 200; ++rep) {
    testing::PathOptions so;
    so.right_jumps = false;
    so.slopes = false;
    const auto S = testing::random_path(rng, 1.0, so);
    const auto H = random_increasing(rng, false);
    EXPECT_NEAR(integrate(S, H, 0.0, 1.0), testing::rs_oracle(S, H, 0.0, 1.0), 1e-10);
  }
}

TEST(Integration, GeneralPathsMatchOracleOnSubintervals) {
  Rng rng(22);
  for (int rep = 0; rep < 100; ++rep) {
    const auto S = random_cadlag(rng);
    const auto H = random_increasing(rng);
    double s = testing::uniform(rng, 0.0, 1.0), t = testing::uniform(rng, 0.0, 1.0);
    if (s > t) std::swap(s, t);
    if (t - s < 1e-3) continue;
    EXPECT_NEAR(integrate(S, H, s, t), testing::rs_oracle(S, H, s, t), 1e-10);
  }
}

TEST(Integration, SharedJumpTimes) {
  Rng rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    testing::PathOptions so;
    so.right_jumps = false;
    so.forced_times = {0.25, 0.5, 1.0};
    testing::PathOptions ho = so;
    ho.right_jumps = true;
    ho.increasing = true;
    const auto S = testing::random_path(rng, 1.0, so);
    const auto H = testing::random_path(rng, 1.0, ho);
    EXPECT_NEAR(integrate(S, H), testing::rs_oracle(S, H, 0.0, 1.0), 1e-10);
  }
}

TEST(Integration, LinearInIntegrator) {
  Rng rng(24);
  for (int rep = 0; rep < 50; ++rep) {
    const auto S = random_cadlag(rng);
    const auto H = random_increasing(rng);
    const auto G = random_increasing(rng);
    const double a = testing::uniform(rng, 0.0, 2.0), b = testing::uniform(rng, 0.0, 2.0);
    EXPECT_NEAR(integrate(S, a * H + b * G), a * integrate(S, H) + b * integrate(S, G), 1e-12);
  }
}

TEST(Integration, SignedIntegralUsesJordanHahn) {
  Rng rng(25);
  for (int rep = 0; rep < 50; ++rep) {
    const auto S = random_cadlag(rng);
    const auto H = testing::random_path(rng, 1.0);
    EXPECT_NEAR(integrate_signed(S, H, 0.0, 1.0), testing::rs_oracle(S, H, 0.0, 1.0), 1e-10);
  }
}

TEST(Integration, FlattenThresholdSplit) {
  const LadlagPath S(1.0, 3.0, 0.0, {{0.3, 0.5, 0.0}, {0.6, 2.0, 0.0}}, {0.0, 0.0, 0.0});
  const auto f = flatten_eps(S, 1.0);
  ASSERT_EQ(f.big_jumps.size(), 1u);
  EXPECT_EQ(f.big_jumps[0].time, 0.6);
  EXPECT_EQ(f.big_jumps[0].size, 2.0);
  EXPECT_EQ(f.flattened.left_jump_at(0.3), 0.5);
  EXPECT_EQ(f.flattened.left_jump_at(0.6), 0.0);

  const auto g = flatten_eps(S, 5.0);
  EXPECT_TRUE(g.big_jumps.empty());
  for (double t : {0.0, 0.3, 0.5, 0.6, 1.0}) EXPECT_EQ(g.flattened.value_at(t), S.value_at(t));
}

TEST(Integration, FlattenReassembles) {
  Rng rng(26);
  for (int rep = 0; rep < 50; ++rep) {
    const auto S = random_cadlag(rng);
    const double eps = testing::uniform(rng, 0.05, 0.8);
    const auto f = flatten_eps(S, eps);
    for (const auto& e : f.flattened.events()) EXPECT_LT(std::abs(e.left_jump), eps);
    const auto sum = f.flattened + big_jump_steps(f.big_jumps, 1.0);
    for (int i = 0; i <= 1000; ++i) {
      const double t = testing::uniform(rng, 0.0, 1.0);
      EXPECT_NEAR(sum.value_at(t), S.value_at(t), 1e-12);
    }
    for (const auto& e : S.events()) {
      EXPECT_NEAR(sum.value_at(e.time), S.value_at(e.time), 1e-12);
      EXPECT_NEAR(sum.left_limit_at(e.time), S.left_limit_at(e.time), 1e-12);
    }
  }
}

double sup_error(const LadlagPath& S, const StepPath& step, int n = 10000) {
  double err = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    err = std::max(err, std::abs(S.value_at(t) - step.value_at(t)));
  }
  return err;
}

TEST(Integration, StepApproximationConstant) {
  const auto step = step_approximation(LadlagPath::constant(1.0, 2.0), 0.1);
  EXPECT_EQ(step.levels.size(), 1u);
  EXPECT_EQ(sup_error(LadlagPath::constant(1.0, 2.0), step), 0.0);
}

TEST(Integration, StepApproximationRamp) {
  const LadlagPath ramp(1.0, 0.0, 0.0, {}, {1.0});
  const auto step = step_approximation(ramp, 0.25);
  EXPECT_LE(step.times.size(), 5u);
  EXPECT_LE(sup_error(ramp, step), 0.5);
}

TEST(Integration, StepApproximationRandom) {
  Rng rng(27);
  for (int rep = 0; rep < 50; ++rep) {
    const auto S = random_cadlag(rng);
    const double eps = testing::uniform(rng, 0.05, 0.5);
    const auto flat = flatten_eps(S, eps).flattened;
    EXPECT_LE(sup_error(flat, step_approximation(flat, eps)), 2.0 * eps + 1e-12);
  }
}

TEST(Integration, StepIntegralMatchesOracle) {
  // int step dH against the left-continuous step read directly.
  Rng rng(28);
  for (int rep = 0; rep < 30; ++rep) {
    const auto S = flatten_eps(random_cadlag(rng), 0.3).flattened;
    const auto step = step_approximation(S, 0.3);
    const auto H = random_increasing(rng);
    double expect = 0.0;
    for (std::size_t i = 0; i < step.times.size(); ++i) {
      const double a = step.times[i];
      const double b = i + 1 < step.times.size() ? step.times[i + 1] : 1.0;
      expect += step.levels[i] * (H.value_at(b) - H.value_at(a));
    }
    EXPECT_NEAR(integrate_step(step, H, 1.0), expect, 1e-12);
  }
}

TEST(Integration, CertifiedExactRegime) {
  const auto S = LadlagPath::constant(1.0, 2.0);
  const LadlagPath H(1.0, 0.0, 1.0, {{0.5, 1.0, 1.0}}, {1.0, 1.0});
  const auto c = certified_integral(S, H, 0.5);
  EXPECT_EQ(c.error_bound, 4.0 * 0.5 * total_variation(H));
  EXPECT_NEAR(c.value, integrate(S, H), 1e-15);
}

TEST(Integration, CertifiedBoundDominates) {
  Rng rng(29);
  for (int rep = 0; rep < 200; ++rep) {
    const auto S = random_cadlag(rng);
    const auto H = random_increasing(rng);
    const double exact = integrate(S, H);
    double prev_bound = std::numeric_limits<double>::infinity();
    for (double eps : {1.0, 0.1, 0.01}) {
      const auto c = certified_integral(S, H, eps);
      EXPECT_LE(std::abs(c.value - exact), c.error_bound + 1e-12);
      EXPECT_LE(c.error_bound, prev_bound);
      prev_bound = c.error_bound;
    }
  }
}

}  // namespace
}  // namespace tcr
