#include <gtest/gtest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "ctsev/cohort.hpp"
#include "ctsev/error.hpp"
#include "ctsev/features.hpp"

namespace ctsev {
namespace {

TEST(Cohort, SizesAndOrder) {
  const Dataset d = synth_cohort(CohortSpec::null_cohort(), 121, 55, 1);
  EXPECT_EQ(d.rows(), 176u);
  EXPECT_EQ(d.columns(), 63u);
  const auto counts = d.class_counts();
  EXPECT_EQ(counts[0], 121u);
  EXPECT_EQ(counts[1], 55u);
  EXPECT_EQ(d.label(0), Label::NonSevere);
  EXPECT_EQ(d.label(175), Label::Severe);
  EXPECT_EQ(d.row_name(0), "P001");
  EXPECT_EQ(d.row_name(175), "P176");
}

TEST(Cohort, DeterministicBySeed) {
  const auto spec = CohortSpec::with_signal(std::vector<FeatureId>{1, 2}, 2.0);
  const Dataset a = synth_cohort(spec, 20, 10, 3), b = synth_cohort(spec, 20, 10, 3), c = synth_cohort(spec, 20, 10, 4);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t col = 0; col < a.columns(); ++col) ASSERT_EQ(a.value(r, col), b.value(r, col));
  }
  EXPECT_NE(a.value(0, 0), c.value(0, 0));
}

TEST(Cohort, DistributionModeRanges) {
  const auto spec = CohortSpec::with_signal(std::vector<FeatureId>{5, 59}, 4.0);
  const Dataset d = synth_cohort(spec, 50, 50, 2);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t c = 0; c < d.columns(); ++c) {
      const double v = d.value(r, c);
      ASSERT_GE(v, 0.0);
      if (feature_kind(d.feature_ids()[c]) == FeatureKind::Ratio) {
        ASSERT_LE(v, 1.0);
      }
    }
  }
}

TEST(Cohort, SignalShiftsSevereMeans) {
  const auto spec = CohortSpec::with_signal(std::vector<FeatureId>{30}, 3.0);
  const Dataset d = synth_cohort(spec, 200, 200, 9);
  const std::size_t col = *d.column_of(30);
  double ns = 0, s = 0;
  for (std::size_t r = 0; r < d.rows(); ++r) (d.label(r) == Label::Severe ? s : ns) += d.value(r, col);
  EXPECT_GT(s / 200.0, ns / 200.0);
}

TEST(Cohort, PhantomModeSatisfiesFeatureInvariants) {
  CohortSpec spec;
  spec.mode = CohortMode::Phantom;
  const Dataset d = synth_cohort(spec, 4, 4, 5);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    auto v = [&](FeatureId id) { return d.value(r, *d.column_of(id)); };
    EXPECT_NEAR(v(6) + v(8), v(4), 1e-9 * std::max(1.0, v(4)));
    EXPECT_NEAR(v(57) + v(59) + v(61) + v(63), 1.0, 1e-9);
  }
  double severe_ir = 0, non_ir = 0;
  for (std::size_t r = 0; r < d.rows(); ++r) (d.label(r) == Label::Severe ? severe_ir : non_ir) += d.value(r, 4);
  EXPECT_GT(severe_ir, non_ir);
}

TEST(Cohort, SpecValidation) {
  EXPECT_THROW(CohortSpec::with_signal(std::vector<FeatureId>{64}, 1.0), SpecError);
  EXPECT_THROW(CohortSpec::from_json(nlohmann::json{{"mode", "other"}}), SpecError);
  EXPECT_THROW(CohortSpec::from_json(nlohmann::json{{"phantom_infection_mean", {0.1, 1.5}}}), SpecError);
  const auto spec = CohortSpec::from_json(nlohmann::json{{"signal_ids", {59, 61}}, {"separation", 2.0}});
  EXPECT_GT(spec.severe[58].mean, spec.non_severe[58].mean);
}

}  // namespace
}  // namespace ctsev
