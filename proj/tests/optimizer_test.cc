/* Copyright 2026 The Codesign Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


#include "codesign/optimizer.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "codesign/error.h"
#include "test_support.h"

namespace codesign {
namespace {

using enum FusionStrategy;

Scenario ScenarioOf(const testing::RandomInstance& inst) {
  return Scenario{inst.model, inst.terminal, inst.edge, inst.link,
                  inst.penalties, inst.lambda1};
}

void ExpectSamePlan(const PartitionPlan& a, const PartitionPlan& b) {
  EXPECT_EQ(a.cut, b.cut);
  EXPECT_EQ(a.theta1, b.theta1);
  EXPECT_EQ(a.theta2, b.theta2);
  EXPECT_EQ(a.cost.lagrangian, b.cost.lagrangian);
  EXPECT_EQ(a.cost.t_total, b.cost.t_total);
}

// Ten 1e9-FLOP layers on two identical compute-bound devices, so the compute
// time does not depend on the cut. The link payload at boundary b is
// |b - 3| * 625 kB + 100 kB, a V with its apex at lambda = 0.3 and slope
// 0.5 s per unit of lambda on either side.
struct VShapedFixture {
  static constexpr double kSlope = 0.5;

  ModelProfile model{"vee", {}};
  DeviceProfile device = testing::Device("dev", 1e12, 1e12);
  LinkProfile link{12.5e6, 0.0};
  AccuracyPenaltyTable penalties = testing::Penalties({0, 0, 0, 0}, {0, 0, 0, 0});

  VShapedFixture() {
    for (std::size_t k = 0; k < 10; ++k) {
      const double b = static_cast<double>(k + 1);
      model.layers.push_back(
          testing::PlainLayer(k, 1e9, 1e6, std::abs(b - 3) * 625000 + 1e5));
    }
  }
  Scenario scenario() const {
    return Scenario{model, device, device, link, penalties, 0.0};
  }
  double relaxed(double lambda) const {
    return RelaxedLatency(model, kS3, kS3, device, device, link, lambda);
  }
};

TEST(RanksBefore, TieBreakOrder) {
  PartitionPlan a, b;
  a.cost.lagrangian = b.cost.lagrangian = 1.0;
  a.cost.t_total = 0.5;
  b.cost.t_total = 0.6;
  EXPECT_TRUE(RanksBefore(a, b));
  b.cost.t_total = 0.5;
  a.cut = 2;
  b.cut = 1;
  EXPECT_TRUE(RanksBefore(b, a));
  b.cut = 2;
  a.theta1 = kS3;
  b.theta1 = kS3Ss;
  EXPECT_TRUE(RanksBefore(a, b));
  b.theta1 = kS3;
  a.theta2 = kS3S1;
  b.theta2 = kS3Ss;
  EXPECT_TRUE(RanksBefore(b, a));
  EXPECT_FALSE(RanksBefore(a, a));
}

TEST(GridSearch, EnumeratesEveryCandidate) {
  const auto inst = testing::MakeRandomInstance(5);
  const auto all = EnumerateCandidates(ScenarioOf(inst));
  ASSERT_EQ(all.size(), inst.model.num_cuts() * 16);
  std::size_t slot = 0;
  for (std::size_t cut = 1; cut < inst.model.num_layers(); ++cut) {
    for (FusionStrategy a : kAllStrategies) {
      for (FusionStrategy b : kAllStrategies) {
        EXPECT_EQ(all[slot].cut, cut);
        EXPECT_EQ(all[slot].theta1, a);
        EXPECT_EQ(all[slot].theta2, b);
        ++slot;
      }
    }
  }
}

TEST(GridSearch, MatchesBruteForceOracle) {
  for (std::uint64_t seed = 1000; seed < 1200; ++seed) {
    const auto inst = testing::MakeRandomInstance(seed);
    const auto oracle = testing::BruteForceArgmin(inst);
    const GridSearchResult r = GridSearch(ScenarioOf(inst));
    EXPECT_EQ(r.best.cut, oracle.cut) << seed;
    EXPECT_EQ(static_cast<int>(r.best.theta1), oracle.theta1) << seed;
    EXPECT_EQ(static_cast<int>(r.best.theta2), oracle.theta2) << seed;
    EXPECT_EQ(r.best.cost.lagrangian, oracle.lagrangian) << seed;
  }
}

TEST(GridSearch, PureLatencyAtZeroWeight) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto inst = testing::MakeRandomInstance(seed);
    inst.lambda1 = 0.0;
    const GridSearchResult r = GridSearch(ScenarioOf(inst));
    for (const PartitionPlan& p : r.ranked) {
      EXPECT_LE(r.best.cost.t_total, p.cost.t_total);
    }
  }
}

TEST(GridSearch, BestNotWorseThanAnyCandidate) {
  for (std::uint64_t seed = 300; seed < 330; ++seed) {
    const auto inst = testing::MakeRandomInstance(seed);
    const GridSearchResult r = GridSearch(ScenarioOf(inst));
    for (std::size_t i = 1; i < r.ranked.size(); ++i) {
      EXPECT_LE(r.best.cost.lagrangian, r.ranked[i].cost.lagrangian);
      EXPECT_FALSE(RanksBefore(r.ranked[i], r.ranked[i - 1]));
    }
  }
}

TEST(GridSearch, HeavyAccuracyWeightPicksFullStructure) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto inst = testing::MakeRandomInstance(seed);
    inst.penalties = testing::Penalties({3, 2, 1, 0}, {3, 2, 1, 0});
    inst.lambda1 = 1e9;
    const GridSearchResult r = GridSearch(ScenarioOf(inst));
    EXPECT_EQ(r.best.theta1, kS3SsS1);
    EXPECT_EQ(r.best.theta2, kS3SsS1);
  }
}

TEST(GridSearch, SingletonSearchSpace) {
  const ModelProfile m = testing::UniformModel(2, 1e9, 1e7, 1e5);
  const AccuracyPenaltyTable zero = testing::Penalties({0, 0, 0, 0}, {0, 0, 0, 0});
  const DeviceProfile d1 = testing::Nano(), d2 = testing::Nx();
  const LinkProfile link{12.5e6, 0};
  const GridSearchResult r = GridSearch(Scenario{m, d1, d2, link, zero, 0.1});
  // All sixteen candidates tie; enum order decides.
  EXPECT_EQ(r.best.cut, 1u);
  EXPECT_EQ(r.best.theta1, kS3);
  EXPECT_EQ(r.best.theta2, kS3);
  ASSERT_EQ(r.ranked.size(), 16u);
  EXPECT_EQ(r.ranked.back().theta1, kS3SsS1);
  EXPECT_EQ(r.ranked.back().theta2, kS3SsS1);
}

TEST(GridSearch, DeterministicAcrossThreadCounts) {
  for (std::uint64_t seed = 40; seed < 60; ++seed) {
    const auto inst = testing::MakeRandomInstance(seed);
    const GridSearchResult base = GridSearch(ScenarioOf(inst), {false, 1});
    for (unsigned threads : {0u, 2u, 3u, 8u}) {
      const GridSearchResult r = GridSearch(ScenarioOf(inst), {false, threads});
      ASSERT_EQ(r.ranked.size(), base.ranked.size());
      for (std::size_t i = 0; i < r.ranked.size(); ++i) {
        ExpectSamePlan(r.ranked[i], base.ranked[i]);
      }
    }
  }
}

TEST(GridSearch, StrictModeFiltersInfeasible) {
  const Config c = LoadConfig(testing::FixturePath("fixtures/jetson.json"));
  const DeviceProfile& nano = FindDevice(c, "Nano");
  const Scenario s{c.model, nano, nano, c.link, c.penalties, c.lambda1};
  const GridSearchResult r = GridSearch(s, {true, 1});
  for (const PartitionPlan& p : r.ranked) EXPECT_TRUE(p.feasible.both());
  EXPECT_LT(r.ranked.size(), c.model.num_cuts() * 16);
}

TEST(GridSearch, NoFeasiblePlan) {
  // Intensity 10 everywhere against a balance of ~410.
  const ModelProfile m = testing::UniformModel(4, 1e9, 1e8, 1e5);
  const AccuracyPenaltyTable zero = testing::Penalties({0, 0, 0, 0}, {0, 0, 0, 0});
  const DeviceProfile nx = testing::Nx();
  const LinkProfile link{12.5e6, 0};
  const Scenario s{m, nx, nx, link, zero, 0.0};
  EXPECT_NO_THROW(GridSearch(s));
  try {
    GridSearch(s, {true, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoFeasiblePlan);
  }
}

TEST(RelaxedLatency, AgreesWithDiscreteCostAtBoundaries) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = testing::MakeRandomInstance(seed);
    const Scenario s = ScenarioOf(inst);
    for (std::size_t cut = 1; cut < inst.model.num_layers(); ++cut) {
      const PartitionPlan p = EvaluatePlan(s, cut, kS3Ss, kS3S1);
      const double relaxed = RelaxedLatency(inst.model, kS3Ss, kS3S1, inst.terminal,
                                            inst.edge, inst.link, p.lambda);
      EXPECT_NEAR(relaxed, p.cost.t_total, 1e-9 * p.cost.t_total) << seed << " " << cut;
    }
  }
}

TEST(RefineLambda, FindsInteriorMinimum) {
  const VShapedFixture f;
  // Dense grid scan as the reference minimizer.
  double scan_best = 0.0, scan_value = 1e300;
  for (int k = 1; k < 10000; ++k) {
    const double lambda = k * 1e-4;
    const double v = f.relaxed(lambda);
    if (v < scan_value) {
      scan_value = v;
      scan_best = lambda;
    }
  }
  EXPECT_NEAR(scan_best, 0.3, 1e-4);

  PartitionPlan start = EvaluatePlan(f.scenario(), 5, kS3, kS3);
  ASSERT_EQ(start.lambda, 0.5);
  const Refinement r = RefineLambda(f.scenario(), start, 1e-3, 500);
  EXPECT_LT(std::abs(r.lambda - 0.3), 1e-3);
  EXPECT_LT(std::abs(r.lambda - scan_best), 1e-3);
  ASSERT_EQ(r.trace.size(), 501u);
  EXPECT_EQ(r.trace.front().lambda, 0.5);
  // Fixed-step descent on a function with slope G can overshoot a kink and
  // gain at most step * G^2 per iteration.
  const double slack = 1e-3 * VShapedFixture::kSlope * VShapedFixture::kSlope;
  for (std::size_t k = 0; k + 1 < r.trace.size(); ++k) {
    EXPECT_LE(r.trace[k + 1].t_total, r.trace[k].t_total + slack + 1e-12);
    if (std::abs(r.trace[k].lambda - 0.3) > 1e-3 * VShapedFixture::kSlope) {
      EXPECT_LT(r.trace[k + 1].t_total, r.trace[k].t_total);
    }
  }
}

TEST(RefineLambda, ZeroStepIsNoOp) {
  const VShapedFixture f;
  const PartitionPlan start = EvaluatePlan(f.scenario(), 6, kS3, kS3);
  const Refinement r = RefineLambda(f.scenario(), start, 0.0, 50);
  EXPECT_EQ(r.lambda, start.lambda);
  for (const DescentStep& step : r.trace) EXPECT_EQ(step.lambda, start.lambda);
}

TEST(RefineLambda, StartAtMinimizerStays) {
  const VShapedFixture f;
  const PartitionPlan start = EvaluatePlan(f.scenario(), 3, kS3, kS3);
  const double step = 1e-3;
  const Refinement r = RefineLambda(f.scenario(), start, step, 100);
  // One step moves lambda by at most step * slope.
  EXPECT_LE(std::abs(r.lambda - start.lambda), step * VShapedFixture::kSlope + 1e-12);
}

TEST(RefineLambda, IteratesStayInsideUnitInterval) {
  const VShapedFixture f;
  const PartitionPlan start = EvaluatePlan(f.scenario(), 1, kS3, kS3);
  const Refinement r = RefineLambda(f.scenario(), start, 10.0, 20);
  for (const DescentStep& step : r.trace) {
    EXPECT_GT(step.lambda, 0.0);
    EXPECT_LT(step.lambda, 1.0);
    EXPECT_TRUE(std::isfinite(step.t_total));
  }
}

TEST(SnapToBoundary, Examples) {
  EXPECT_EQ(SnapToBoundary(0.5, testing::UniformModel(4, 1, 1, 1)), 2u);
  EXPECT_EQ(SnapToBoundary(0.49, testing::UniformModel(10, 1, 1, 1)), 5u);
  const ModelProfile skewed{"skewed", {testing::PlainLayer(0, 7, 1, 1),
                                       testing::PlainLayer(1, 2, 1, 1),
                                       testing::PlainLayer(2, 1, 1, 1)}};
  // Prefix shares 0.7 and 0.9 are equally far from 0.8; the smaller wins.
  EXPECT_EQ(SnapToBoundary(0.8, skewed), 1u);
  EXPECT_EQ(SnapToBoundary(0.81, skewed), 2u);
  EXPECT_EQ(SnapToBoundary(1e-9, skewed), 1u);
  EXPECT_EQ(SnapToBoundary(1 - 1e-9, skewed), 2u);
}

TEST(SnapAndCompare, NotWorseThanNeighbours) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = testing::MakeRandomInstance(seed);
    const Scenario s = ScenarioOf(inst);
    const PartitionPlan start = GridSearch(s).best;
    const Refinement r = RefineLambda(s, start, 1e-3, 100);
    const PartitionPlan snapped = SnapAndCompare(s, start, r.lambda);
    // The two boundaries bracketing lambda by cumulative full-structure share.
    const std::size_t n = inst.model.num_layers();
    std::size_t lo = 1;
    while (lo + 1 < n && PartitionFraction(inst.model, lo + 1) <= r.lambda) ++lo;
    const std::size_t hi = std::min(lo + 1, n - 1);
    for (std::size_t cut : {lo, hi}) {
      const PartitionPlan p = EvaluatePlan(s, cut, start.theta1, start.theta2);
      EXPECT_LE(snapped.cost.lagrangian, p.cost.lagrangian) << seed;
    }
  }
}

TEST(ThreadsFromEnv, ParsesVariable) {
  ::setenv("CODESIGN_THREADS", "3", 1);
  EXPECT_EQ(ThreadsFromEnv(), 3u);
  ::setenv("CODESIGN_THREADS", "junk", 1);
  EXPECT_EQ(ThreadsFromEnv(), 0u);
  ::unsetenv("CODESIGN_THREADS");
  EXPECT_EQ(ThreadsFromEnv(), 0u);
}

}  // namespace
}  // namespace codesign
