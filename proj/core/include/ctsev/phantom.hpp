#pragma once

#include <array>
#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "ctsev/volume.hpp"

namespace ctsev {

// Normal intensity model, truncated to a tissue's HU band when sampled.
struct TissueModel {
  double mean_hu = 0.0;
  double sd_hu = 0.0;
};

// Synthetic chest phantom. The lung is a centred ellipsoid; its voxels are
// split into right (low x) and left halves and then into segment slabs along
// z so that each segment receives its exact share of the lung.
struct PhantomSpec {
  Dims dims{32, 32, 32};
  Spacing spacing{1.0, 1.0, 1.0};
  // Ellipsoid semi-axes as a fraction of the half-extent on each axis.
  double lung_extent = 0.9;
  // Share of the whole-lung voxel count per segment code 1..18; sums to 1.
  std::array<double, kSegmentCount> segment_fractions;
  // Infected share of each segment's voxels.
  std::array<double, kSegmentCount> infection_fractions{};
  // Infected voxels: probability of the GGO band (otherwise consolidation).
  double ggo_share = 0.7;
  // Uninfected lung voxels: probability of the calcification band (vessels).
  double vessel_fraction = 0.02;
  TissueModel normal{-850.0, 50.0};
  TissueModel ggo{-550.0, 90.0};
  TissueModel consolidation{-120.0, 70.0};
  TissueModel calcification{200.0, 80.0};
  TissueModel outside{40.0, 30.0};  // non-lung voxels, not clipped to a band
  std::uint64_t seed = 0;

  PhantomSpec() { segment_fractions.fill(1.0 / kSegmentCount); }

  // Throws SpecError for fractions outside [0,1], segment shares not summing
  // to 1, non-positive geometry, or band means outside their band.
  void validate() const;

  static PhantomSpec from_json(const nlohmann::json& j);  // missing keys keep defaults
  nlohmann::json to_json() const;
};

struct Phantom {
  CtVolume ct;
  RegionLabelMap labels;
  InfectionMask infection;
};

// Pure function of `spec`; byte-identical output for identical specs.
Phantom generate_phantom(const PhantomSpec& spec);

}  // namespace ctsev
