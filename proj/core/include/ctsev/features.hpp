#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>

#include "ctsev/volume.hpp"

namespace ctsev {

using FeatureId = int;  // 1..63
inline constexpr int kFeatureCount = 63;

enum class TissueClass : std::uint8_t { Normal, Ggo, Consolidation, Calcification };

// Half-open HU interval [lower, upper).
struct HuBand {
  double lower;
  double upper;
  TissueClass tissue;

  bool contains(double hu) const { return lower <= hu && hu < upper; }
};

inline constexpr std::array<HuBand, 4> kHuBands{{
    {-std::numeric_limits<double>::infinity(), -750.0, TissueClass::Normal},
    {-750.0, -300.0, TissueClass::Ggo},
    {-300.0, 50.0, TissueClass::Consolidation},
    {50.0, std::numeric_limits<double>::infinity(), TissueClass::Calcification},
}};

const HuBand& hu_band(TissueClass tissue);
const char* tissue_name(TissueClass tissue);

enum class FeatureKind : std::uint8_t { Volume, Ratio };

bool is_valid_feature_id(FeatureId id);
// Display name, e.g. "V(WL)", "IR(RB_M)", "IV(LS7)", "R(HU[-750,-300))".
std::string feature_name(FeatureId id);
FeatureKind feature_kind(FeatureId id);
// "f01".."f63"
std::string feature_column(FeatureId id);

// Feature values in table order:
//   1-3   V(WL), V(RL), V(LL)
//   4-9   IV/IR pairs for WL, RL, LL
//   10-19 IV/IR pairs for RB_S, RB_M, RB_I, LB_S, LB_I
//   20-39 IV/IR pairs for RS1..RS10
//   40-55 IV/IR pairs for LS1..LS8
//   56-63 V/R pairs for the normal, GGO, consolidation, calcification bands
// Volumes in mL, ratios dimensionless.
class FeatureVector {
 public:
  FeatureVector() { values_.fill(0.0); }

  double operator[](FeatureId id) const { return values_[static_cast<std::size_t>(id - 1)]; }
  double& operator[](FeatureId id) { return values_[static_cast<std::size_t>(id - 1)]; }
  std::span<const double, kFeatureCount> values() const { return values_; }

  bool operator==(const FeatureVector&) const = default;

 private:
  std::array<double, kFeatureCount> values_;
};

// First feature id of the IV/IR pair for `sel`.
FeatureId infection_feature_id(const RegionSelector& sel);

struct BandMeasure {
  double volume_ml = 0.0;
  double ratio = 0.0;
};

double infection_volume(const RegionLabelMap& labels, const InfectionMask& infection,
                        const RegionSelector& sel, const LobeMap& map = default_lobe_map());

// IV/V; 0 (with a warning) when the region has no voxels.
double infection_ratio(const RegionLabelMap& labels, const InfectionMask& infection,
                       const RegionSelector& sel, const LobeMap& map = default_lobe_map());

// Lung voxels (label != 0) inside the band; ratio is against V(WL). Throws
// DegenerateError for an empty lung.
BandMeasure hu_band_features(const CtVolume& ct, const RegionLabelMap& labels, const HuBand& band);

FeatureVector extract_features(const CtVolume& ct, const RegionLabelMap& labels,
                               const InfectionMask& infection,
                               const LobeMap& map = default_lobe_map());

}  // namespace ctsev
