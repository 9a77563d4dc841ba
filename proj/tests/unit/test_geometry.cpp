#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "generators.hpp"
#include "hybridsort/errors.hpp"
#include "hybridsort/geometry.hpp"

using namespace hybridsort;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kSamples = 100000;

std::vector<Observation> line_history(int n, double du, double dv) {
  std::vector<Observation> h;
  for (int k = 0; k < n; ++k) {
    h.push_back({k + 1, Box{10.0 + du * k, 20.0 + dv * k, 30.0 + du * k, 60.0 + dv * k}});
  }
  return h;
}

}  // namespace

TEST(Iou, Examples) {
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {20, 20, 30, 30}), 0.0);
  EXPECT_NEAR(iou({0, 0, 10, 10}, {5, 5, 15, 15}), 25.0 / 175.0, 1e-12);
  EXPECT_DOUBLE_EQ(iou({3, 3, 3, 3}, {3, 3, 3, 3}), 0.0);
}

TEST(Hiou, Examples) {
  EXPECT_DOUBLE_EQ(hiou({0, 0, 10, 10}, {3, 0, 7, 10}), 1.0);
  EXPECT_NEAR(hiou({0, 0, 10, 10}, {0, 5, 10, 15}), 5.0 / 15.0, 1e-12);
  EXPECT_DOUBLE_EQ(hiou({0, 0, 10, 10}, {0, 20, 10, 30}), 0.0);
  EXPECT_DOUBLE_EQ(hiou({0, 4, 10, 4}, {2, 4, 8, 4}), 0.0);
}

TEST(Hmiou, Examples) {
  EXPECT_DOUBLE_EQ(hmiou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  // IoU 25/175 and HIoU 5/15 give 1/21.
  EXPECT_NEAR(hmiou({0, 0, 10, 10}, {5, 5, 15, 15}), 1.0 / 21.0, 1e-9);
  EXPECT_NEAR(hmiou({0, 0, 10, 10}, {5, 5, 15, 15}), 0.047619, 1e-6);
  // Same vertical offset without the horizontal one: IoU 50/150, HIoU 5/15.
  EXPECT_NEAR(hmiou({0, 0, 10, 10}, {0, 5, 10, 15}), 1.0 / 9.0, 1e-9);
  EXPECT_DOUBLE_EQ(hmiou({0, 0, 10, 10}, {50, 50, 60, 60}), 0.0);
}

TEST(Wmiou, Examples) {
  EXPECT_DOUBLE_EQ(wmiou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_NEAR(wmiou({0, 0, 10, 10}, {5, 5, 15, 15}), 1.0 / 21.0, 1e-9);
  EXPECT_NEAR(wmiou({0, 0, 10, 10}, {5, 0, 15, 10}), 1.0 / 9.0, 1e-9);
  EXPECT_DOUBLE_EQ(width_iou({0, 0, 10, 10}, {0, 20, 10, 30}), 1.0);
  EXPECT_DOUBLE_EQ(wmiou({0, 0, 10, 10}, {0, 20, 10, 30}), 0.0);
}

TEST(ConfidenceCost, Examples) {
  EXPECT_DOUBLE_EQ(confidence_cost(0.9, 0.9), 0.0);
  EXPECT_NEAR(confidence_cost(0.9, 0.6), 0.3, 1e-12);
  EXPECT_DOUBLE_EQ(confidence_cost(0.0, 1.0), 1.0);
}

TEST(LinearConfidence, Examples) {
  EXPECT_DOUBLE_EQ(linear_confidence_prediction(0.8, std::nullopt), 0.8);
  EXPECT_NEAR(linear_confidence_prediction(0.8, 0.9), 0.7, 1e-12);
  EXPECT_DOUBLE_EQ(linear_confidence_prediction(0.95, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(linear_confidence_prediction(0.05, 0.5), 0.0);
}

TEST(VelocityDirection, Examples) {
  EXPECT_DOUBLE_EQ(*velocity_direction({0, 0}, {1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(*velocity_direction({0, 0}, {0, 1}), kPi / 2);
  EXPECT_NEAR(*velocity_direction({0, 0}, {-1, -1}), -3 * kPi / 4, 1e-12);
  EXPECT_DOUBLE_EQ(*velocity_direction({0, 0}, {-1, 0}), kPi);
  EXPECT_FALSE(velocity_direction({2, 3}, {2, 3}).has_value());
}

TEST(AngleDifference, Examples) {
  EXPECT_DOUBLE_EQ(angle_difference(0.0, 0.0), 0.0);
  EXPECT_NEAR(angle_difference(kPi - 0.1, -kPi + 0.1), 0.2, 1e-12);
  EXPECT_NEAR(angle_difference(0.0, kPi), kPi, 1e-12);
}

TEST(Rocm, StraightLineContinuesIsZero) {
  const auto h = line_history(4, 2.0, 0.0);
  const Box det = h.back().box.translated(2.0, 0.0);
  EXPECT_NEAR(rocm_cost(h, det), 0.0, 1e-12);
}

TEST(Rocm, ReversalCostsThreePi) {
  const auto h = line_history(4, 2.0, 0.0);
  const Box det = h.back().box.translated(-2.0, 0.0);
  EXPECT_NEAR(rocm_cost(h, det), 3 * kPi, 1e-9);
}

TEST(Rocm, ShortHistories) {
  const auto one = line_history(1, 2.0, 0.0);
  EXPECT_DOUBLE_EQ(rocm_cost(one, one.back().box.translated(-5, 3)), 0.0);
  EXPECT_DOUBLE_EQ(rocm_cost({}, Box{0, 0, 1, 1}), 0.0);
  // Two observations give only the one-frame interval.
  const auto two = line_history(2, 2.0, 0.0);
  EXPECT_NEAR(rocm_cost(two, two.back().box.translated(-2.0, 0.0)), kPi, 1e-9);
}

TEST(Rocm, GapInHistorySkipsMissingIntervals) {
  // Observations at frames 1 and 3; last is 3, so only dt = 2 exists.
  std::vector<Observation> h{{1, Box{0, 0, 10, 10}}, {3, Box{4, 0, 14, 10}}};
  EXPECT_NEAR(rocm_cost(h, Box{2, 0, 12, 10}), kPi, 1e-9);
}

TEST(Rocm, DetectionOnLastObservationContributesZero) {
  const auto h = line_history(4, 2.0, 0.0);
  EXPECT_DOUBLE_EQ(rocm_cost(h, h.back().box), 0.0);
}

TEST(CosineAppearance, Examples) {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const std::vector<double> o1{1.0, 0.0};
  const std::vector<double> o2{0.0, 1.0};
  const std::vector<double> neg{-1.0, -2.0, -3.0};
  EXPECT_NEAR(cosine_appearance_cost(a, a), 0.0, 1e-12);
  EXPECT_NEAR(cosine_appearance_cost(o1, o2), 1.0, 1e-12);
  EXPECT_NEAR(cosine_appearance_cost(a, neg), 2.0, 1e-12);
}

TEST(CosineAppearance, ZeroNormIsNeutralAndCounted) {
  const std::vector<double> z{0.0, 0.0};
  const std::vector<double> v{1.0, 0.0};
  std::uint64_t counter = 0;
  EXPECT_DOUBLE_EQ(cosine_appearance_cost(z, v, &counter), 1.0);
  EXPECT_EQ(counter, 1u);
  EXPECT_THROW((void)cosine_appearance_cost(v, std::vector<double>{1.0}), InputError);
}

// ---- properties -----------------------------------------------------------------

TEST(GeometryProperties, SimilarityBoundsSymmetryAndOrdering) {
  testgen::Rng rng(1);
  for (int k = 0; k < kSamples; ++k) {
    const auto [a, b] = testgen::box_pair(rng);
    for (auto f : {iou, hiou, hmiou, wmiou, width_iou}) {
      const double ab = f(a, b);
      ASSERT_GE(ab, 0.0);
      ASSERT_LE(ab, 1.0);
      ASSERT_EQ(ab, f(b, a));
    }
    ASSERT_LE(hmiou(a, b), std::min(iou(a, b), hiou(a, b)) + 1e-15);
    ASSERT_LE(wmiou(a, b), std::min(iou(a, b), width_iou(a, b)) + 1e-15);
    ASSERT_NEAR(iou(a, a), 1.0, 1e-12);
    ASSERT_NEAR(hmiou(a, a), 1.0, 1e-12);
  }
}

TEST(GeometryProperties, DisjointBoxesScoreZero) {
  testgen::Rng rng(2);
  for (int k = 0; k < kSamples; ++k) {
    const Box a = testgen::box(rng);
    const double gap = rng.uniform(0.0, 50.0);
    const double y = rng.uniform(-50, 50);
    const Box b{a.x2 + gap, y, a.x2 + gap + rng.uniform(0.5, 40), y + rng.uniform(0.5, 40)};
    ASSERT_EQ(iou(a, b), 0.0);
    ASSERT_EQ(hmiou(a, b), 0.0);
    ASSERT_EQ(wmiou(a, b), 0.0);
  }
}

TEST(GeometryProperties, TranslationInvariances) {
  testgen::Rng rng(3);
  for (int k = 0; k < kSamples; ++k) {
    const auto [a, b] = testgen::box_pair(rng);
    const double d = rng.uniform(-100, 100);
    ASSERT_NEAR(hiou(a, b), hiou(a, b.translated(d, 0.0)), 1e-12);
    ASSERT_NEAR(width_iou(a, b), width_iou(a, b.translated(0.0, d)), 1e-12);
    ASSERT_NEAR(iou(a, b), iou(a.translated(d, -d), b.translated(d, -d)), 1e-9);
  }
}

TEST(GeometryProperties, ConfidenceCostAndClamp) {
  testgen::Rng rng(4);
  for (int k = 0; k < kSamples; ++k) {
    const double a = rng.uniform(0, 1);
    const double b = rng.uniform(0, 1);
    ASSERT_EQ(confidence_cost(a, b), confidence_cost(b, a));
    ASSERT_GE(confidence_cost(a, b), 0.0);
    const double p = linear_confidence_prediction(a, b);
    ASSERT_GE(p, 0.0);
    ASSERT_LE(p, 1.0);
  }
}

TEST(GeometryProperties, LinearPredictionExactOnArithmeticSequences) {
  testgen::Rng rng(5);
  for (int k = 0; k < kSamples; ++k) {
    const double next = rng.uniform(0.0, 1.0);
    const double step = rng.uniform(-0.3, 0.3);
    const double prev = next - step;
    const double prev2 = prev - step;
    if (prev < 0 || prev > 1 || prev2 < 0 || prev2 > 1) continue;
    ASSERT_NEAR(linear_confidence_prediction(prev, prev2), next, 1e-12);
  }
}

TEST(GeometryProperties, AngleDifferenceWrapAndRange) {
  testgen::Rng rng(6);
  for (int k = 0; k < kSamples; ++k) {
    const double t = rng.uniform(-4 * kPi, 4 * kPi);
    const double p = rng.uniform(-4 * kPi, 4 * kPi);
    const double d = angle_difference(t, p);
    ASSERT_GE(d, 0.0);
    ASSERT_LE(d, kPi);
    ASSERT_NEAR(angle_difference(t + 2 * kPi, p), d, 1e-12);
    ASSERT_NEAR(angle_difference(p, t), d, 1e-12);
  }
}

TEST(GeometryProperties, RocmTranslationInvariantAndBounded) {
  testgen::Rng rng(7);
  for (int k = 0; k < kSamples; ++k) {
    std::vector<Observation> h;
    const int n = rng.integer(1, 5);
    Box b = testgen::box(rng);
    int frame = 1;
    for (int i = 0; i < n; ++i) {
      h.push_back({frame, b});
      frame += rng.integer(1, 2);
      b = b.translated(rng.uniform(-5, 5), rng.uniform(-5, 5));
    }
    const Box det = b.translated(rng.uniform(-5, 5), rng.uniform(-5, 5));
    const double c = rocm_cost(h, det);
    ASSERT_GE(c, 0.0);
    ASSERT_LE(c, 3 * kPi + 1e-12);
    const double du = rng.uniform(-500, 500);
    const double dv = rng.uniform(-500, 500);
    std::vector<Observation> moved = h;
    for (auto& o : moved) o.box = o.box.translated(du, dv);
    ASSERT_NEAR(rocm_cost(moved, det.translated(du, dv)), c, 1e-9);
  }
}

TEST(GeometryProperties, CosineRange) {
  testgen::Rng rng(8);
  for (int k = 0; k < kSamples; ++k) {
    std::vector<double> a(4);
    std::vector<double> b(4);
    for (auto& x : a) x = rng.normal(0, 1);
    for (auto& x : b) x = rng.normal(0, 1);
    const double c = cosine_appearance_cost(a, b);
    ASSERT_GE(c, -1e-12);
    ASSERT_LE(c, 2.0 + 1e-12);
    ASSERT_NEAR(c, cosine_appearance_cost(b, a), 1e-12);
  }
}
