#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "tcrobust/errors.hpp"
#include "tcrobust/paths.hpp"

namespace tcr {
namespace {

using testing::Rng;

LadlagPath jump_path() {
  return LadlagPath(2.0, 0.0, 0.0, {{1.0, 2.0, 3.0}}, {0.0, 0.0});
}

TEST(Paths, ConstantPath) {
  const auto p = LadlagPath::constant(3.0, 5.0);
  for (double t : {0.0, 0.5, 1.7, 3.0}) EXPECT_EQ(p.value_at(t), 5.0);
  EXPECT_EQ(total_variation(p), 0.0);
}

TEST(Paths, JumpBookkeeping) {
  const auto p = jump_path();
  EXPECT_EQ(p.left_limit_at(1.0), 0.0);
  EXPECT_EQ(p.value_at(1.0), 2.0);
  EXPECT_EQ(p.right_limit_at(1.0), 5.0);
  EXPECT_EQ(p.value_at(1.5), 5.0);
}

TEST(Paths, DomainErrors) {
  const auto p = jump_path();
  EXPECT_THROW(p.value_at(-0.1), DomainError);
  EXPECT_THROW(p.value_at(2.1), DomainError);
  EXPECT_THROW(p.left_limit_at(0.0), DomainError);
  EXPECT_THROW(p.right_limit_at(2.0), DomainError);
  EXPECT_THROW(LadlagPath(1.0, 0.0, 0.0, {{1.0, 0.0, 1.0}}, {0.0, 0.0}), ContractViolation);
}

TEST(Paths, LimitsMatchApproachSequences) {
  Rng rng(11);
  for (int rep = 0; rep < 5; ++rep) {
    testing::PathOptions o;
    o.max_events = 10;
    const auto p = testing::random_path(rng, 1.0, o);
    for (int i = 0; i <= 10000; ++i) {
      const double t = i / 10000.0;
      if (t > 0.0) {
        // H_{t-} = lim H_{t - h}
        const double h = 1e-13;
        EXPECT_NEAR(p.left_limit_at(t), p.value_at(t - h), 1e-11) << t;
      }
      if (t < 1.0) {
        EXPECT_NEAR(p.right_limit_at(t), p.value_at(t + 1e-13), 1e-11) << t;
      }
    }
    for (const auto& e : p.events()) {
      EXPECT_EQ(p.value_at(e.time), p.left_limit_at(e.time) + e.left_jump);
      if (e.time < 1.0) {
        EXPECT_EQ(p.right_limit_at(e.time), p.value_at(e.time) + e.right_jump);
      }
      // Approach from both sides along a decreasing step sequence.
      for (double h = 1e-6; h > 1e-12; h /= 10.0) {
        EXPECT_NEAR(p.value_at(e.time - h), p.left_limit_at(e.time), 10.0 * h + 1e-12);
        if (e.time < 1.0) {
          EXPECT_NEAR(p.value_at(e.time + h), p.right_limit_at(e.time), 10.0 * h + 1e-12);
        }
      }
    }
  }
}

TEST(Paths, JordanHahnIncreasingPath) {
  const LadlagPath p(1.0, 2.0, 0.5, {{0.5, 1.0, 0.25}}, {1.0, 2.0});
  const auto jh = jordan_hahn(p);
  for (double t : {0.0, 0.3, 0.5, 0.9, 1.0}) {
    EXPECT_DOUBLE_EQ(jh.up.value_at(t), p.value_at(t) - 2.0);
    EXPECT_EQ(jh.down.value_at(t), 0.0);
  }
}

TEST(Paths, JordanHahnOppositeJumps) {
  const LadlagPath p(3.0, 0.0, 0.0, {{1.0, 1.0, 0.0}, {2.0, -1.0, 0.0}}, {0.0, 0.0, 0.0});
  const auto jh = jordan_hahn(p);
  EXPECT_EQ(jh.up.terminal_value(), 1.0);
  EXPECT_EQ(jh.down.terminal_value(), 1.0);
}

TEST(Paths, JordanHahnRandomMatchesPartitionSup) {
  Rng rng(12);
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = testing::random_path(rng, 1.0);
    const auto jh = jordan_hahn(p);
    EXPECT_TRUE(jh.up.is_increasing());
    EXPECT_TRUE(jh.down.is_increasing());
    EXPECT_NEAR(jh.up.terminal_value() + jh.down.terminal_value(), testing::variation_oracle(p, 1.0),
                1e-10);
    for (int i = 0; i <= 1000; ++i) {
      const double t = i / 1000.0;
      EXPECT_NEAR(p.initial_value() + jh.up.value_at(t) - jh.down.value_at(t), p.value_at(t), 1e-12);
    }
  }
}

TEST(Paths, DecomposePureSlope) {
  const LadlagPath p(1.0, 3.0, 0.0, {}, {2.0});
  const auto parts = decompose_parts(p);
  EXPECT_DOUBLE_EQ(parts.continuous.value_at(0.5), 1.0);
  EXPECT_EQ(total_variation(parts.left_part), 0.0);
  EXPECT_EQ(total_variation(parts.right_part), 0.0);
}

TEST(Paths, DecomposePureLeftJumps) {
  const LadlagPath p(1.0, 3.0, 0.0, {{0.25, 1.0, 0.0}, {0.75, -2.0, 0.0}}, {0.0, 0.0, 0.0});
  const auto parts = decompose_parts(p);
  EXPECT_EQ(total_variation(parts.continuous), 0.0);
  EXPECT_EQ(total_variation(parts.right_part), 0.0);
  EXPECT_EQ(parts.left_part.value_at(0.5), 1.0);
  EXPECT_EQ(parts.left_part.value_at(1.0), -1.0);
}

TEST(Paths, DecomposeReassemblesExactly) {
  Rng rng(13);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = testing::random_path(rng, 1.0);
    const auto parts = decompose_parts(p);
    EXPECT_TRUE(parts.right_part.is_cadlag());
    for (const auto& e : parts.continuous.events()) {
      EXPECT_EQ(e.left_jump, 0.0);
      EXPECT_EQ(e.right_jump, 0.0);
    }
    EXPECT_EQ(parts.continuous.initial_right_jump(), 0.0);
    auto rebuilt = [&](double t, LimitKind kind) {
      const double rp = kind == LimitKind::Right ? parts.right_part.at(t, LimitKind::Value)
                        : t == 0.0               ? 0.0
                                                 : parts.right_part.left_limit_at(t);
      return p.initial_value() + parts.continuous.at(t, kind) + parts.left_part.at(t, kind) + rp;
    };
    for (int i = 0; i <= 1000; ++i) {
      const double t = i / 1000.0;
      EXPECT_NEAR(rebuilt(t, LimitKind::Value), p.value_at(t), 1e-12);
    }
    for (const auto& e : p.events()) {
      EXPECT_NEAR(rebuilt(e.time, LimitKind::Left), p.left_limit_at(e.time), 1e-12);
      EXPECT_NEAR(rebuilt(e.time, LimitKind::Value), p.value_at(e.time), 1e-12);
      if (e.time < 1.0) {
        EXPECT_NEAR(rebuilt(e.time, LimitKind::Right), p.right_limit_at(e.time), 1e-12);
      }
    }
  }
}

TEST(Paths, TotalVariationExamples) {
  const LadlagPath p(3.0, 0.0, 0.0, {{1.0, 2.0, 0.0}, {2.0, -3.0, 0.0}}, {0.0, 0.0, 0.0});
  EXPECT_EQ(total_variation(p, 2.5), 5.0);
  EXPECT_EQ(total_variation(p, 1.5), 2.0);
  // The right jump at t itself is not part of |H|_t.
  const auto q = jump_path();
  EXPECT_EQ(total_variation(q, 1.0), 2.0);
  EXPECT_EQ(total_variation(q, 1.5), 5.0);
}

TEST(Paths, TotalVariationRandomProperties) {
  Rng rng(14);
  for (int rep = 0; rep < 100; ++rep) {
    const auto a = testing::random_path(rng, 1.0);
    const auto b = testing::random_path(rng, 1.0);
    double prev = 0.0;
    for (int i = 0; i <= 50; ++i) {
      const double t = i / 50.0;
      const double v = total_variation(a, t);
      EXPECT_NEAR(v, testing::variation_oracle(a, t), 1e-10);
      EXPECT_GE(v, prev - 1e-15);
      prev = v;
      EXPECT_LE(total_variation(a + b, t), total_variation(a, t) + total_variation(b, t) + 1e-12);
    }
  }
}

TEST(Paths, RefinedIsSamePath) {
  Rng rng(15);
  const auto p = testing::random_path(rng, 1.0);
  const std::vector<double> extra{0.1, 0.33, 1.0};
  const auto q = p.refined(extra);
  for (int i = 0; i <= 200; ++i) {
    const double t = i / 200.0;
    EXPECT_NEAR(q.value_at(t), p.value_at(t), 1e-12);
  }
}

}  // namespace
}  // namespace tcr
