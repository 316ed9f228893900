#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "equilib/config.hpp"

using namespace equilib;
using std::numbers::pi;

TEST(Gaps, LineWindow) {
  auto cfg = LineConfig::finite_window({0, 1, 2});
  EXPECT_EQ(gaps(cfg), (std::vector<double>{1, 1}));
}

TEST(Gaps, CircleExamples) {
  auto g = gaps(CircleConfig{{0, pi / 2, pi, 3 * pi / 2}});
  ASSERT_EQ(g.size(), 4u);
  for (double x : g) EXPECT_NEAR(x, pi / 2, 1e-15);

  auto h = gaps(CircleConfig{{0, 1, 4}});
  ASSERT_EQ(h.size(), 3u);
  EXPECT_DOUBLE_EQ(h[0], 1);
  EXPECT_DOUBLE_EQ(h[1], 3);
  EXPECT_NEAR(h[2], 2 * pi - 4, 1e-15);
}

TEST(Gaps, TrivialConfigHasConstantGaps) {
  for (std::size_t n : {2u, 5u, 41u, 200u}) {
    auto cfg = LineConfig::trivial(0.75, n, -3.0);
    for (double g : gaps(cfg)) EXPECT_DOUBLE_EQ(g, 0.75);
  }
}

TEST(Gaps, RandomCircleGapsSumToTwoPi) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  std::uniform_int_distribution<int> n_dist(2, 40);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> raw(static_cast<std::size_t>(n_dist(rng)));
    for (auto& a : raw) a = u(rng);
    auto cfg = CircleConfig::from_angles(raw);
    double total = 0;
    for (double g : gaps(cfg)) total += g;
    EXPECT_NEAR(total, kTwoPi, 1e-12);
  }
}

TEST(ExtremalGaps, LineUniqueMax) {
  auto e = extremal_gaps(LineConfig::finite_window({0, 1, 3, 4}));
  ASSERT_EQ(e.max_indices.size(), 1u);
  EXPECT_EQ(e.max_indices[0], 1u);
  EXPECT_DOUBLE_EQ(e.max_value, 2);
  EXPECT_TRUE(e.max_strict);
  EXPECT_EQ(e.min_indices, (std::vector<std::size_t>{0, 2}));
}

TEST(ExtremalGaps, TrivialHasNoStrictExtremum) {
  auto e = extremal_gaps(LineConfig::trivial(1.0, 6));
  EXPECT_EQ(e.max_indices.size(), 5u);
  EXPECT_FALSE(e.max_strict);
  EXPECT_FALSE(e.min_strict);
}

TEST(ExtremalGaps, CircleWrapArc) {
  auto e = extremal_gaps(CircleConfig{{0, 1.0, 2.0, 4.0}});
  ASSERT_EQ(e.max_indices.size(), 1u);
  EXPECT_EQ(e.max_indices[0], 3u);
  EXPECT_NEAR(e.max_value, 2 * pi - 4, 1e-15);
  EXPECT_TRUE(e.max_strict);
}

TEST(Canonicalize, Examples) {
  auto a = canonicalize_circle(CircleConfig{{0.3, 0.3 + pi}});
  EXPECT_EQ(a.angles[0], 0.0);
  EXPECT_NEAR(a.angles[1], pi, 1e-15);

  CircleConfig already{{0, 1, 2}};
  EXPECT_EQ(canonicalize_circle(already).angles, already.angles);

  auto b = canonicalize_circle(CircleConfig{{1, 2, 3}});
  EXPECT_EQ(b.angles, (std::vector<double>{0, 1, 2}));
}

TEST(Canonicalize, IdempotentAndPreservesArcs) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> raw(7);
    for (auto& a : raw) a = u(rng);
    auto cfg = CircleConfig::from_angles(raw);
    auto once = canonicalize_circle(cfg);
    EXPECT_EQ(canonicalize_circle(once).angles, once.angles);
    auto g0 = gaps(cfg), g1 = gaps(once);
    std::sort(g0.begin(), g0.end());
    std::sort(g1.begin(), g1.end());
    for (std::size_t i = 0; i < g0.size(); ++i) EXPECT_NEAR(g0[i], g1[i], 1e-14);
  }
}

TEST(LineConfig, Validation) {
  auto good = LineConfig::trivial(1.0, 5);
  EXPECT_NO_THROW(good.validate());

  auto unsorted = LineConfig::finite_window({0, 2, 1});
  EXPECT_THROW(unsorted.validate(), InvalidInput);

  auto overlap = LineConfig::trivial(1.0, 5);
  overlap.right_tail.start = 3.5;
  EXPECT_THROW(overlap.validate(), InvalidInput);

  auto out_of_bounds = LineConfig::trivial(1.0, 5);
  out_of_bounds.right_tail = TailModel::arithmetic(5.0, 3.0);
  EXPECT_THROW(out_of_bounds.validate(), InvalidInput);

  auto bad_gap = LineConfig::trivial(1.0, 3);
  bad_gap.left_tail = TailModel::periodic(-1.0, {1.0, -1.0});
  EXPECT_THROW(bad_gap.validate(), InvalidInput);
}

TEST(TailModel, OffsetsFollowPattern) {
  auto t = TailModel::periodic(0.0, {1.0, 2.0, 0.5});
  EXPECT_DOUBLE_EQ(t.offset(0), 0.0);
  EXPECT_DOUBLE_EQ(t.offset(1), 1.0);
  EXPECT_DOUBLE_EQ(t.offset(2), 3.0);
  EXPECT_DOUBLE_EQ(t.offset(3), 3.5);
  EXPECT_DOUBLE_EQ(t.offset(4), 4.5);
  EXPECT_DOUBLE_EQ(t.period(), 3.5);
}

TEST(CircleConfig, Validation) {
  EXPECT_THROW(CircleConfig{{0.0}}.validate(), InvalidInput);
  EXPECT_THROW((CircleConfig{{1.0, 0.5}}.validate()), InvalidInput);
  EXPECT_THROW((CircleConfig{{0.0, 7.0}}.validate()), InvalidInput);
  EXPECT_NO_THROW(CircleConfig::equally_spaced(5).validate());
}
