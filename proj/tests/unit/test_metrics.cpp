#include <gtest/gtest.h>

#include <cmath>

#include "ctsev/error.hpp"
#include "ctsev/metrics.hpp"
#include "ctsev/random.hpp"
#include "oracles.hpp"

namespace ctsev {
namespace {

constexpr Label S = Label::Severe;
constexpr Label N = Label::NonSevere;

TEST(ConfusionMetrics, Perfect) {
  const std::vector<Label> t{S, N, S, N};
  const auto m = confusion_metrics(t, t);
  EXPECT_EQ(*m.tpr, 1.0);
  EXPECT_EQ(*m.tnr, 1.0);
  EXPECT_EQ(*m.accuracy, 1.0);
}

TEST(ConfusionMetrics, AllPredictedNonSevere) {
  std::vector<Label> t(11, N);
  t.insert(t.end(), 5, S);
  const std::vector<Label> p(16, N);
  const auto m = confusion_metrics(t, p);
  EXPECT_EQ(*m.tpr, 0.0);
  EXPECT_EQ(*m.tnr, 1.0);
  EXPECT_DOUBLE_EQ(*m.accuracy, 11.0 / 16.0);
}

TEST(ConfusionMetrics, HandCounts) {
  std::vector<Label> t, p;
  auto add = [&](Label truth, Label pred, int n) {
    for (int i = 0; i < n; ++i) {
      t.push_back(truth);
      p.push_back(pred);
    }
  };
  add(S, S, 51);
  add(S, N, 4);
  add(N, N, 90);
  add(N, S, 31);
  const auto m = confusion_metrics(t, p);
  EXPECT_EQ(m.counts, (ConfusionCounts{51, 4, 90, 31}));
  EXPECT_NEAR(*m.tpr, 0.927, 5e-4);
  EXPECT_NEAR(*m.tnr, 0.744, 5e-4);
  EXPECT_NEAR(*m.accuracy, 0.801, 5e-4);
  EXPECT_EQ(m.counts.tp + m.counts.fn, 55u);
  EXPECT_EQ(m.counts.tn + m.counts.fp, 121u);
}

TEST(ConfusionMetrics, AbsentClassIsUndefined) {
  const std::vector<Label> t{N, N}, p{N, S};
  const auto m = confusion_metrics(t, p);
  EXPECT_FALSE(m.tpr.has_value());
  EXPECT_EQ(*m.tnr, 0.5);
  const std::vector<Label> a{S}, b{S, N};
  EXPECT_THROW(confusion_metrics(a, b), InvalidInputError);
}

TEST(ConfusionMetrics, NonSeverePositiveSwapsRoles) {
  const std::vector<Label> t{S, S, N}, p{S, N, N};
  const auto m = confusion_metrics(t, p, N);
  EXPECT_EQ(m.counts, (ConfusionCounts{1, 0, 1, 1}));
}

TEST(Roc, PerfectOrdering) {
  const std::vector<Label> t{N, N, S, S};
  const std::vector<double> s{0.1, 0.2, 0.8, 0.9};
  const auto roc = roc_curve(t, s);
  EXPECT_EQ(roc.auc, 1.0);
  bool through_corner = false;
  for (const auto& p : roc.points) through_corner |= p.fpr == 0.0 && p.tpr == 1.0;
  EXPECT_TRUE(through_corner);
  EXPECT_TRUE(std::isinf(roc.points.front().threshold));
}

TEST(Roc, AllEqualScores) {
  const std::vector<Label> t{N, S, N, S, S};
  const std::vector<double> s(5, 0.3);
  const auto roc = roc_curve(t, s);
  ASSERT_EQ(roc.points.size(), 2u);
  EXPECT_EQ(roc.auc, 0.5);
}

TEST(Roc, ReversedOrdering) {
  const std::vector<Label> t{S, S, N, N};
  const std::vector<double> s{0.1, 0.2, 0.8, 0.9};
  EXPECT_EQ(roc_curve(t, s).auc, 0.0);
}

TEST(Roc, OneClassIsDegenerate) {
  const std::vector<Label> t{S, S};
  const std::vector<double> s{0.1, 0.2};
  EXPECT_THROW(roc_curve(t, s), DegenerateError);
}

TEST(Roc, MonotoneEndpointsAndMannWhitney) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    std::vector<Label> t(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = rng.uniform() < 0.4 ? S : N;
      s[i] = trial % 2 == 0 ? static_cast<double>(rng.below(4)) / 4.0 : rng.uniform();
    }
    t[0] = S;
    t[1] = N;
    const auto roc = roc_curve(t, s);
    EXPECT_EQ(roc.points.front().fpr, 0.0);
    EXPECT_EQ(roc.points.front().tpr, 0.0);
    EXPECT_EQ(roc.points.back().fpr, 1.0);
    EXPECT_EQ(roc.points.back().tpr, 1.0);
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
      EXPECT_GE(roc.points[i].fpr, roc.points[i - 1].fpr);
      EXPECT_GE(roc.points[i].tpr, roc.points[i - 1].tpr);
      EXPECT_LT(roc.points[i].threshold, roc.points[i - 1].threshold);
    }
    EXPECT_NEAR(roc.auc, oracle::mann_whitney_auc(t, s, S), 1e-12);
    EXPECT_EQ(auc(roc), roc.auc);
  }
}

TEST(Roc, NonSeverePositiveFlipsArea) {
  const std::vector<Label> t{N, S, N, S, S};
  const std::vector<double> s{0.2, 0.7, 0.4, 0.1, 0.9};
  EXPECT_NEAR(roc_curve(t, s, S).auc + roc_curve(t, s, N).auc, 1.0, 1e-12);
}

TEST(Auc, Trapezoid) {
  const std::vector<RocPoint> pts{{1, 0, 0}, {0.5, 0.5, 0.5}, {0, 1, 1}};
  EXPECT_DOUBLE_EQ(auc(pts), 0.5);
  const std::vector<RocPoint> step{{1, 0, 0}, {0.5, 0.0, 1.0}, {0, 1, 1}};
  EXPECT_DOUBLE_EQ(auc(step), 1.0);
}

}  // namespace
}  // namespace ctsev
