#include <gtest/gtest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "ctsev/error.hpp"
#include "ctsev/features.hpp"
#include "ctsev/phantom.hpp"
#include "fixtures.hpp"

namespace ctsev {
namespace {

bool in_band(int hu, TissueClass t) {
  const HuBand& b = hu_band(t);
  return hu >= b.lower && hu < b.upper;
}

TEST(Phantom, ZeroInfectionGivesEmptyMask) {
  PhantomSpec spec;
  const Phantom ph = generate_phantom(spec);
  for (auto v : ph.infection.data()) ASSERT_EQ(v, 0);
}

TEST(Phantom, FullyInfectedSingleSegment) {
  PhantomSpec spec;
  spec.infection_fractions[0] = 1.0;  // RS1
  const Phantom ph = generate_phantom(spec);
  const FeatureVector f = extract_features(ph.ct, ph.labels, ph.infection);
  const FeatureId rs1 = infection_feature_id(RegionSelector::segment(1));
  EXPECT_EQ(f[rs1 + 1], 1.0);
  for (int code = 2; code <= 18; ++code) EXPECT_EQ(f[infection_feature_id(RegionSelector::segment(code))], 0.0);
}

TEST(Phantom, DeterministicGivenSeed) {
  testing::TempDir dir("ph");
  Rng rng(3);
  const PhantomSpec spec = testing::random_phantom_spec(rng);
  const Phantom a = generate_phantom(spec);
  const Phantom b = generate_phantom(spec);
  EXPECT_TRUE(std::equal(a.ct.data().begin(), a.ct.data().end(), b.ct.data().begin()));
  EXPECT_TRUE(std::equal(a.labels.data().begin(), a.labels.data().end(), b.labels.data().begin()));
  EXPECT_TRUE(std::equal(a.infection.data().begin(), a.infection.data().end(), b.infection.data().begin()));
  PhantomSpec other = spec;
  other.seed ^= 1;
  const Phantom c = generate_phantom(other);
  EXPECT_FALSE(std::equal(a.ct.data().begin(), a.ct.data().end(), c.ct.data().begin()));
}

TEST(Phantom, TypeInvariantsAndBands) {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const PhantomSpec spec = testing::random_phantom_spec(rng);
    const Phantom ph = generate_phantom(spec);
    EXPECT_NO_THROW(require_infection_within_lung(ph.labels, ph.infection));
    for (std::size_t i = 0; i < ph.ct.size(); ++i) {
      const int hu = ph.ct[i];
      if (ph.labels[i] == 0) continue;
      if (ph.infection[i] == 1) {
        ASSERT_TRUE(in_band(hu, TissueClass::Ggo) || in_band(hu, TissueClass::Consolidation)) << hu;
      } else {
        ASSERT_TRUE(in_band(hu, TissueClass::Normal) || in_band(hu, TissueClass::Calcification)) << hu;
      }
    }
  }
}

TEST(Phantom, SegmentInfectionMatchesSpecWithinOneVoxel) {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const PhantomSpec spec = testing::random_phantom_spec(rng);
    const Phantom ph = generate_phantom(spec);
    for (int code = 1; code <= 18; ++code) {
      const auto n = region_voxel_count(ph.labels, RegionSelector::segment(code));
      const auto k = region_voxel_count(ph.labels, RegionSelector::segment(code), ph.infection);
      EXPECT_LE(std::abs(static_cast<double>(k) - spec.infection_fractions[static_cast<std::size_t>(code - 1)] *
                                                      static_cast<double>(n)),
                1.0);
    }
  }
}

TEST(Phantom, SegmentSharesFollowSpec) {
  PhantomSpec spec;
  spec.segment_fractions.fill(0.0);
  spec.segment_fractions[0] = 0.5;   // RS1
  spec.segment_fractions[12] = 0.5;  // LS3
  const Phantom ph = generate_phantom(spec);
  const auto whole = region_voxel_count(ph.labels, RegionSelector::whole_lung());
  const auto rs1 = region_voxel_count(ph.labels, RegionSelector::segment(1));
  EXPECT_GT(whole, 0u);
  EXPECT_EQ(rs1 + region_voxel_count(ph.labels, RegionSelector::segment(13)), whole);
  EXPECT_LE(std::abs(static_cast<double>(rs1) - 0.5 * static_cast<double>(whole)), 1.0);
}

TEST(Phantom, ValidationRejectsInfeasibleSpecs) {
  PhantomSpec spec;
  spec.infection_fractions[3] = 2.0;
  EXPECT_THROW(spec.validate(), SpecError);
  EXPECT_THROW(generate_phantom(spec), SpecError);

  spec = {};
  spec.segment_fractions[0] += 0.1;
  EXPECT_THROW(spec.validate(), SpecError);

  spec = {};
  spec.ggo.mean_hu = -100;  // consolidation band
  EXPECT_THROW(spec.validate(), SpecError);

  spec = {};
  spec.spacing.y = 0;
  EXPECT_THROW(spec.validate(), Error);
}

TEST(Phantom, JsonRoundTrip) {
  Rng rng(5);
  const PhantomSpec spec = testing::random_phantom_spec(rng);
  const PhantomSpec back = PhantomSpec::from_json(spec.to_json());
  const Phantom a = generate_phantom(spec), b = generate_phantom(back);
  EXPECT_TRUE(std::equal(a.ct.data().begin(), a.ct.data().end(), b.ct.data().begin()));
  EXPECT_THROW(PhantomSpec::from_json(nlohmann::json{{"infection_fractions", 1.5}}), SpecError);
  EXPECT_THROW(PhantomSpec::from_json(nlohmann::json{{"dims", {1, 2}}}), SpecError);
}

}  // namespace
}  // namespace ctsev
