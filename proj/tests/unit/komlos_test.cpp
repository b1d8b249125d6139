#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "generators.hpp"
#include "tcrobust/analysis.hpp"
#include "tcrobust/errors.hpp"
#include "tcrobust/integration.hpp"
#include "tcrobust/komlos.hpp"
#include "tcrobust/optimize.hpp"

namespace tcr {
namespace {

using testing::Rng;

ModelFamily family(Rng& rng) {
  return testing::random_cps_family(rng, {.max_events = 2, .max_scenarios = 4}, 0.2, 0.1,
                                    {.num_models = 2});
}

void expect_same(const Strategy& a, const Strategy& b, double tol) {
  const auto za = a.increments(), zb = b.increments();
  ASSERT_EQ(za.size(), zb.size());
  for (std::size_t i = 0; i < za.size(); ++i) EXPECT_NEAR(za[i], zb[i], tol) << i;
}

TEST(NearestInHull, TargetInsideGivesExactPoint) {
  const std::vector<std::vector<double>> pts{{0, 0}, {2, 0}, {0, 2}};
  const std::vector<double> target{0.5, 0.5};
  const auto w = nearest_in_hull(pts, target);
  double x = 0, y = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    x += w[i] * pts[i][0];
    y += w[i] * pts[i][1];
  }
  EXPECT_NEAR(x, 0.5, 1e-12);
  EXPECT_NEAR(y, 0.5, 1e-12);
}

TEST(NearestInHull, ProjectsOntoEdge) {
  const std::vector<std::vector<double>> pts{{0, 0}, {2, 0}, {0, 2}};
  const std::vector<double> target{2, 2};
  const auto w = nearest_in_hull(pts, target);
  EXPECT_NEAR(w[0], 0.0, 1e-12);
  EXPECT_NEAR(w[1], 0.5, 1e-12);
  EXPECT_NEAR(w[2], 0.5, 1e-12);
}

TEST(NearestInHull, MatchesBruteForceOnSegments) {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    std::vector<std::vector<double>> pts(2, std::vector<double>(4));
    std::vector<double> t(4);
    for (auto& p : pts) for (double& v : p) v = testing::uniform(rng, -1, 1);
    for (double& v : t) v = testing::uniform(rng, -1, 1);
    double best = INFINITY, best_a = 0;
    for (int k = 0; k <= 100000; ++k) {
      const double a = k / 100000.0;
      double d = 0;
      for (int j = 0; j < 4; ++j) d += std::pow(a * pts[0][j] + (1 - a) * pts[1][j] - t[j], 2);
      if (d < best) { best = d; best_a = a; }
    }
    const auto w = nearest_in_hull(pts, t);
    EXPECT_NEAR(w[0] + w[1], 1.0, 1e-12);
    EXPECT_NEAR(w[0], best_a, 2e-5);
  }
}

TEST(NearestInHull, Contracts) {
  const std::vector<std::vector<double>> none;
  const std::vector<double> t{1.0};
  EXPECT_THROW(nearest_in_hull(none, t), ContractViolation);
  const std::vector<std::vector<double>> bad{{1.0, 2.0}};
  EXPECT_THROW(nearest_in_hull(bad, t), ContractViolation);
}

TEST(Komlos, ConstantSequenceIsFixed) {
  Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    const auto fam = family(rng);
    const auto s = testing::random_admissible_strategy(rng, fam, 1.0);
    const std::vector<Strategy> seq(5, s);
    const auto out = komlos_stabilize(seq, fam);
    ASSERT_EQ(out.combinations.size(), 3u);
    for (const auto& g : out.combinations) expect_same(g, s, 1e-14);
    EXPECT_TRUE(out.limit_admissible);
  }
}

TEST(Komlos, AlternatingSequenceGivesMidpoint) {
  Rng rng(13);
  for (int i = 0; i < 10; ++i) {
    const auto fam = family(rng);
    const auto H = testing::random_admissible_strategy(rng, fam, 1.0);
    const auto G = testing::random_admissible_strategy(rng, fam, 1.0);
    std::vector<Strategy> seq;
    for (int n = 0; n < 8; ++n) seq.push_back(n % 2 ? G : H);
    const auto out = komlos_stabilize(seq, fam);
    const std::vector<Strategy> pair{H, G};
    const std::vector<double> half{0.5, 0.5};
    const auto mid = convex_combination(pair, half);
    for (const auto& g : out.combinations) expect_same(g, mid, 1e-12);
    EXPECT_TRUE(out.limit_admissible);
    for (const auto& w : out.weights) {
      double total = 0;
      for (double v : w) {
        EXPECT_GE(v, 0.0);
        total += v;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Komlos, ConvergentSequenceSettlesAndKeepsValue) {
  Rng rng(21);
  const auto U = Utility::log();
  for (int i = 0; i < 8; ++i) {
    const auto fam = family(rng);
    const auto base = testing::random_admissible_strategy(rng, fam, 1.0, {.max_fraction = 0.5});
    const auto other = testing::random_admissible_strategy(rng, fam, 1.0, {.max_fraction = 0.5});
    std::vector<Strategy> seq;
    double running_min = INFINITY;
    for (int n = 1; n <= 12; ++n) {
      const std::vector<Strategy> pair{base, other};
      const std::vector<double> w{1.0 - 1.0 / (n + 1), 1.0 / (n + 1)};
      seq.push_back(convex_combination(pair, w));
      running_min = std::min(running_min, robust_value(seq.back(), fam, U).value);
    }
    const auto out = komlos_stabilize(seq, fam);
    EXPECT_TRUE(out.limit_admissible);
    for (const auto& g : out.combinations) {
      EXPECT_GE(robust_value(g, fam, U).value, running_min - 1e-9);
    }
  }
}

TEST(Komlos, RejectsInadmissibleAndUnbounded) {
  Rng rng(2);
  const auto fam = family(rng);
  auto layout = std::make_shared<const StrategyLayout>(fam.tree());
  Strategy wild(layout, 1.0);
  wild.set(layout->initial_slot(0), 0.0, 1e6);
  const std::vector<Strategy> bad{wild};
  EXPECT_THROW(komlos_stabilize(bad, fam), ContractViolation);

  Strategy round(layout, 1.0);
  round.set(layout->initial_slot(0), 0.1, 0.0);
  round.set(layout->left_slot(0, 0), 0.0, 0.1);
  const std::vector<Strategy> seq{round};
  EXPECT_NO_THROW(komlos_stabilize(seq, fam, {.variation_cap = 1.0}));
  try {
    komlos_stabilize(seq, fam, {.variation_cap = 0.05});
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("bounded terminal variations"), std::string::npos);
  }
  const std::vector<Strategy> empty;
  EXPECT_THROW(komlos_stabilize(empty, fam), ContractViolation);
}

TEST(ConvergenceDemo, ScaledSequenceErrorsAreOneOverN) {
  Rng rng(17);
  for (int i = 0; i < 10; ++i) {
    const auto S = testing::random_path(rng, 1.0, {.right_jumps = false, .forced_times = {}});
    const auto H = testing::random_path(rng, 1.0, {.increasing = true, .forced_times = {}});
    std::vector<LadlagPath> seq;
    for (int n = 1; n <= 20; ++n) seq.push_back((1.0 + 1.0 / n) * H);
    const std::vector<double> grid{0.25, 0.5, 0.75, 1.0};
    const auto table = convergence_demo(seq, H, S, grid);
    EXPECT_TRUE(table.pointwise_convergent);
    for (std::size_t n = 0; n < seq.size(); ++n) {
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const double full = std::abs(integrate(S, H, 0.0, grid[j]));
        EXPECT_NEAR(table.errors[n][j], full / (n + 1.0), 1e-12 * (1.0 + full));
      }
    }
  }
}

TEST(ConvergenceDemo, SharedJumpTime) {
  // S jumps from 1 to 2 at 1/2; H^n jumps there too, left by 1 + 1/n and right
  // by 1 - 1/n. Left jumps see S_{t-} = 1 and right jumps S_t = 2.
  const auto S = LadlagPath(1.0, 1.0, 0.0, {{0.5, 1.0, 0.0}}, {0.0, 0.0});
  const auto H = LadlagPath(1.0, 0.0, 0.0, {{0.5, 1.0, 1.0}}, {0.0, 0.0});
  std::vector<LadlagPath> seq;
  for (int n = 1; n <= 50; ++n) {
    const double e = 1.0 / n;
    seq.emplace_back(1.0, 0.0, 0.0, std::vector<PathEvent>{{0.5, 1.0 + e, 1.0 - e}},
                     std::vector<double>{0.0, 0.0});
  }
  const std::vector<double> grid{0.25, 0.5, 0.75};
  const auto table = convergence_demo(seq, H, S, grid, {.threshold = 1e-1});
  EXPECT_TRUE(table.pointwise_convergent);
  for (std::size_t n = 0; n < seq.size(); ++n) {
    const double e = 1.0 / (n + 1.0);
    EXPECT_NEAR(table.errors[n][0], 0.0, 1e-15);
    EXPECT_NEAR(table.errors[n][1], e, 1e-14);                  // left jump only
    EXPECT_NEAR(table.errors[n][2], std::abs(e - 2.0 * e), 1e-14);
  }
  EXPECT_EQ(table.stable_from, 10u);  // 1/n < 0.1 from n = 11
}

TEST(ConvergenceDemo, DriftingJumpLocationIsFlagged) {
  // H^n jumps at 1/2 + 1/(n + 2) onto the price jump at 1/2; the pointwise
  // limit jumps right at 1/2, but H^n(1/2+) = 0 for every n.
  const auto S = LadlagPath(1.0, 1.0, 0.0, {{0.5, 1.0, 0.0}}, {0.0, 0.0});
  const auto H = LadlagPath(1.0, 0.0, 0.0, {{0.5, 0.0, 1.0}}, {0.0, 0.0});
  std::vector<LadlagPath> seq;
  for (int n = 1; n <= 30; ++n) {
    seq.emplace_back(1.0, 0.0, 0.0, std::vector<PathEvent>{{0.5 + 1.0 / (n + 2), 1.0, 0.0}},
                     std::vector<double>{0.0, 0.0});
  }
  const std::vector<double> grid{0.5, 1.0};
  const auto table = convergence_demo(seq, H, S, grid);
  EXPECT_FALSE(table.pointwise_convergent);
  EXPECT_EQ(table.offending_time, 0.5);
  EXPECT_EQ(table.offending_kind, LimitKind::Right);
  // Every jump here sees the post-jump price 2, so the totals still agree.
  EXPECT_NEAR(table.errors.back()[1], 0.0, 1e-14);
}

TEST(ConvergenceDemo, Contracts) {
  const auto S = LadlagPath::constant(1.0, 1.0);
  const std::vector<LadlagPath> none;
  const std::vector<double> grid{1.0};
  EXPECT_THROW(convergence_demo(none, S, S, grid), ContractViolation);
  const std::vector<LadlagPath> other{LadlagPath::constant(2.0, 0.0)};
  EXPECT_THROW(convergence_demo(other, S, S, grid), ContractViolation);
}

}  // namespace
}  // namespace tcr
