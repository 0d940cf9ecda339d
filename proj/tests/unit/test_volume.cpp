#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "ctsev/error.hpp"
#include "ctsev/random.hpp"
#include "ctsev/volume.hpp"

namespace ctsev {
namespace {

RegionLabelMap uniform_labels(Dims d, std::uint8_t code) {
  return RegionLabelMap(d, {}, std::vector<std::uint8_t>(static_cast<std::size_t>(d.voxel_count()), code));
}

RegionLabelMap random_labels(Dims d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> v(static_cast<std::size_t>(d.voxel_count()));
  for (auto& x : v) x = static_cast<std::uint8_t>(rng.below(19));
  return RegionLabelMap(d, {}, v);
}

TEST(PhysicalVolume, Examples) {
  EXPECT_EQ(physical_volume(0, {1, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(physical_volume(1000, {1, 1, 1}), 1.0);
  EXPECT_NEAR(physical_volume(8, {0.5, 0.5, 2.0}), 0.004, 1e-15);
}

TEST(PhysicalVolume, LinearInCount) {
  const Spacing s{0.7, 0.9, 1.3};
  EXPECT_NEAR(physical_volume(300, s), 3 * physical_volume(100, s), 1e-12);
}

TEST(PhysicalVolume, RejectsNonPositiveSpacing) {
  EXPECT_THROW(physical_volume(1, {0, 1, 1}), InvalidGeometryError);
  EXPECT_THROW(physical_volume(1, {1, -1, 1}), InvalidGeometryError);
}

TEST(Grids, ValidateShape) {
  EXPECT_THROW(CtVolume({2, 2, 2}, {}, std::vector<std::int16_t>(7)), InvalidGeometryError);
  EXPECT_THROW(CtVolume({0, 2, 2}, {}, {}), InvalidGeometryError);
  EXPECT_THROW(CtVolume({1, 1, 1}, {1, 0, 1}, std::vector<std::int16_t>(1)), InvalidGeometryError);
  EXPECT_NO_THROW(CtVolume({1, 2, 3}, {}, std::vector<std::int16_t>(6)));
}

TEST(Grids, LabelAndFlagRanges) {
  EXPECT_THROW(RegionLabelMap({1, 1, 1}, {}, {19}), InvalidInputError);
  EXPECT_NO_THROW(RegionLabelMap({1, 1, 1}, {}, {18}));
  EXPECT_THROW(InfectionMask({1, 1, 1}, {}, {2}), InvalidInputError);
}

TEST(Grids, XFastestIndexing) {
  std::vector<std::int16_t> v(24);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<std::int16_t>(i);
  const CtVolume ct({2, 3, 4}, {}, v);
  EXPECT_EQ(ct.at(1, 0, 0), 1);
  EXPECT_EQ(ct.at(0, 1, 0), 2);
  EXPECT_EQ(ct.at(0, 0, 1), 6);
}

TEST(Grids, InfectionMustLieInLung) {
  const RegionLabelMap labels({2, 1, 1}, {}, {0, 3});
  EXPECT_NO_THROW(require_infection_within_lung(labels, InfectionMask({2, 1, 1}, {}, {0, 1})));
  EXPECT_THROW(require_infection_within_lung(labels, InfectionMask({2, 1, 1}, {}, {1, 0})), InvalidInputError);
}

TEST(RegionSelector, CodeSets) {
  EXPECT_EQ(RegionSelector::whole_lung().codes().count(), 18u);
  EXPECT_FALSE(RegionSelector::whole_lung().codes()[0]);
  const auto right = RegionSelector::right_lung().codes();
  for (int c = 1; c <= 10; ++c) EXPECT_TRUE(right[static_cast<std::size_t>(c)]);
  EXPECT_EQ(right.count(), 10u);
  EXPECT_EQ(RegionSelector::left_lung().codes().count(), 8u);
  EXPECT_EQ(RegionSelector::lobe(Lobe::RightSuperior).codes(), LabelSet("1110"));
  EXPECT_EQ(RegionSelector::lobe(Lobe::RightMiddle).codes(), LabelSet("110000"));
  EXPECT_EQ(RegionSelector::lobe(Lobe::RightInferior).codes().count(), 5u);
  EXPECT_EQ(RegionSelector::lobe(Lobe::LeftSuperior).codes(), LabelSet("111100000000000"));
  EXPECT_EQ(RegionSelector::lobe(Lobe::LeftInferior).codes(), LabelSet("1111000000000000000"));
  EXPECT_EQ(RegionSelector::segment(12).codes(), LabelSet(1ull << 12));
  EXPECT_THROW(RegionSelector::segment(0), InvalidInputError);
  EXPECT_THROW(RegionSelector::segment(19), InvalidInputError);
}

TEST(RegionSelector, Names) {
  EXPECT_EQ(RegionSelector::whole_lung().name(), "WL");
  EXPECT_EQ(RegionSelector::lobe(Lobe::LeftInferior).name(), "LB_I");
  EXPECT_EQ(RegionSelector::segment(10).name(), "RS10");
  EXPECT_EQ(RegionSelector::segment(11).name(), "LS1");
}

TEST(LobeMap, LobesPartitionSegments) {
  for (const LobeMap& map : {default_lobe_map(),
                             LobeMap::from_segments({{{1, 2}, {3, 4, 5}, {6, 7, 8, 9, 10}, {11, 12, 13}, {14, 15, 16, 17, 18}}})}) {
    LabelSet all;
    for (int l = 0; l < kLobeCount; ++l) {
      const auto codes = RegionSelector::lobe(static_cast<Lobe>(l)).codes(map);
      EXPECT_TRUE((all & codes).none());
      all |= codes;
    }
    EXPECT_EQ(all, RegionSelector::whole_lung().codes());
  }
}

TEST(LobeMap, RejectsInvalidMappings) {
  // Left segment in a right lobe.
  EXPECT_THROW(LobeMap::from_segments({{{1, 2, 3, 11}, {4, 5}, {6, 7, 8, 9, 10}, {12, 13, 14}, {15, 16, 17, 18}}}),
               SpecError);
  // Segment 5 missing.
  EXPECT_THROW(LobeMap::from_segments({{{1, 2, 3}, {4}, {6, 7, 8, 9, 10}, {11, 12, 13, 14}, {15, 16, 17, 18}}}),
               SpecError);
  // Segment 4 twice.
  EXPECT_THROW(LobeMap::from_segments({{{1, 2, 3, 4}, {4, 5}, {6, 7, 8, 9, 10}, {11, 12, 13, 14}, {15, 16, 17, 18}}}),
               SpecError);
}

TEST(LobeMap, JsonRoundTrip) {
  const LobeMap custom =
      LobeMap::from_segments({{{1, 2}, {3, 4, 5}, {6, 7, 8, 9, 10}, {11, 12, 13}, {14, 15, 16, 17, 18}}});
  EXPECT_EQ(LobeMap::from_json(custom.to_json()), custom);
  EXPECT_EQ(LobeMap::from_json(default_lobe_map().to_json()), default_lobe_map());
}

TEST(RegionVoxelCount, Examples) {
  EXPECT_EQ(region_voxel_count(uniform_labels({4, 4, 4}, 0), RegionSelector::whole_lung()), 0u);
  EXPECT_EQ(region_voxel_count(uniform_labels({4, 4, 4}, 1), RegionSelector::segment(1)), 64u);
}

TEST(RegionVoxelCount, MatchesBruteForceScan) {
  const auto labels = random_labels({16, 16, 16}, 11);
  std::uint64_t expected = 0;
  for (std::int64_t z = 0; z < 16; ++z)
    for (std::int64_t y = 0; y < 16; ++y)
      for (std::int64_t x = 0; x < 16; ++x) {
        const int c = labels.at(x, y, z);
        if (c == 4 || c == 5) ++expected;
      }
  EXPECT_EQ(region_voxel_count(labels, RegionSelector::lobe(Lobe::RightMiddle)), expected);
}

TEST(RegionVoxelCount, RestrictedToInfection) {
  const RegionLabelMap labels({4, 1, 1}, {}, {1, 1, 2, 0});
  const InfectionMask inf({4, 1, 1}, {}, {1, 0, 1, 0});
  EXPECT_EQ(region_voxel_count(labels, RegionSelector::segment(1), inf), 1u);
  EXPECT_EQ(region_voxel_count(labels, RegionSelector::whole_lung(), inf), 2u);
  EXPECT_THROW(region_voxel_count(labels, RegionSelector::whole_lung(), InfectionMask({2, 2, 1}, {}, {0, 0, 0, 0})),
               InvalidInputError);
}

TEST(RegionVoxelCount, PartitionProperty) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto labels = random_labels({9, 7, 5}, seed);
    std::uint64_t segments = 0;
    for (int c = 1; c <= 18; ++c) segments += region_voxel_count(labels, RegionSelector::segment(c));
    const auto whole = region_voxel_count(labels, RegionSelector::whole_lung());
    EXPECT_EQ(segments, whole);
    EXPECT_EQ(region_voxel_count(labels, RegionSelector::right_lung()) +
                  region_voxel_count(labels, RegionSelector::left_lung()),
              whole);
  }
}

}  // namespace
}  // namespace ctsev
