#include "ctsev/features.hpp"

#include <cstdio>
#include <vector>

#include "ctsev/log.hpp"

namespace ctsev {
namespace {

// Selectors in the order their IV/IR pairs appear, starting at feature 4.
const std::vector<RegionSelector>& regions() {
  static const std::vector<RegionSelector> r = [] {
    std::vector<RegionSelector> v{
        RegionSelector::whole_lung(), RegionSelector::right_lung(), RegionSelector::left_lung(),
        RegionSelector::lobe(Lobe::RightSuperior), RegionSelector::lobe(Lobe::RightMiddle),
        RegionSelector::lobe(Lobe::RightInferior), RegionSelector::lobe(Lobe::LeftSuperior),
        RegionSelector::lobe(Lobe::LeftInferior)};
    for (int code = 1; code <= kSegmentCount; ++code) v.push_back(RegionSelector::segment(code));
    return v;
  }();
  return r;
}

constexpr FeatureId kFirstInfectionId = 4;
constexpr FeatureId kFirstBandId = 56;

std::string band_label(const HuBand& band) {
  auto bound = [](double v) {
    if (v == -std::numeric_limits<double>::infinity()) return std::string("-inf");
    if (v == std::numeric_limits<double>::infinity()) return std::string("+inf");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return std::string(buf);
  };
  return "HU[" + bound(band.lower) + "," + bound(band.upper) + ")";
}

}  // namespace

const HuBand& hu_band(TissueClass tissue) { return kHuBands[static_cast<std::size_t>(tissue)]; }

const char* tissue_name(TissueClass tissue) {
  switch (tissue) {
    case TissueClass::Normal: return "normal";
    case TissueClass::Ggo: return "ggo";
    case TissueClass::Consolidation: return "consolidation";
    case TissueClass::Calcification: return "calcification";
  }
  return "?";
}

bool is_valid_feature_id(FeatureId id) { return id >= 1 && id <= kFeatureCount; }

std::string feature_name(FeatureId id) {
  if (!is_valid_feature_id(id)) throw InvalidInputError("feature id " + std::to_string(id) + " outside 1..63");
  if (id <= 3) {
    static const char* names[] = {"V(WL)", "V(RL)", "V(LL)"};
    return names[id - 1];
  }
  if (id < kFirstBandId) {
    const int offset = id - kFirstInfectionId;
    const std::string region = regions()[static_cast<std::size_t>(offset / 2)].name();
    return (offset % 2 == 0 ? "IV(" : "IR(") + region + ")";
  }
  const int offset = id - kFirstBandId;
  const std::string band = band_label(kHuBands[static_cast<std::size_t>(offset / 2)]);
  return (offset % 2 == 0 ? "V(" : "R(") + band + ")";
}

FeatureKind feature_kind(FeatureId id) {
  if (!is_valid_feature_id(id)) throw InvalidInputError("feature id " + std::to_string(id) + " outside 1..63");
  if (id <= 3) return FeatureKind::Volume;
  // IV/V at even offsets from 4 and from 56; both starts are even.
  return (id % 2 == 0) ? FeatureKind::Volume : FeatureKind::Ratio;
}

std::string feature_column(FeatureId id) {
  if (!is_valid_feature_id(id)) throw InvalidInputError("feature id " + std::to_string(id) + " outside 1..63");
  char buf[8];
  std::snprintf(buf, sizeof(buf), "f%02d", id);
  return buf;
}

FeatureId infection_feature_id(const RegionSelector& sel) {
  const std::string n = sel.name();
  const auto& r = regions();
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i].name() == n) return kFirstInfectionId + 2 * static_cast<FeatureId>(i);
  }
  throw InvariantViolation("unknown region selector " + n);
}

double infection_volume(const RegionLabelMap& labels, const InfectionMask& infection,
                        const RegionSelector& sel, const LobeMap& map) {
  return physical_volume(region_voxel_count(labels, sel, infection, map), labels.spacing());
}

double infection_ratio(const RegionLabelMap& labels, const InfectionMask& infection,
                       const RegionSelector& sel, const LobeMap& map) {
  const std::uint64_t infected = region_voxel_count(labels, sel, infection, map);
  const std::uint64_t total = region_voxel_count(labels, sel, map);
  if (total == 0) {
    warn("region " + sel.name() + " has zero volume; infection ratio set to 0");
    return 0.0;
  }
  return static_cast<double>(infected) / static_cast<double>(total);
}

BandMeasure hu_band_features(const CtVolume& ct, const RegionLabelMap& labels, const HuBand& band) {
  require_same_geometry(ct, labels, "CT volume vs label map");
  const auto hu = ct.data();
  const auto l = labels.data();
  std::uint64_t lung = 0;
  std::uint64_t in_band = 0;
  for (std::size_t i = 0; i < hu.size(); ++i) {
    if (l[i] == 0) continue;
    ++lung;
    in_band += band.contains(hu[i]) ? 1 : 0;
  }
  if (lung == 0) throw DegenerateError("empty lung: V(WL) = 0");
  return {physical_volume(in_band, ct.spacing()), static_cast<double>(in_band) / static_cast<double>(lung)};
}

FeatureVector extract_features(const CtVolume& ct, const RegionLabelMap& labels,
                               const InfectionMask& infection, const LobeMap& map) {
  require_same_geometry(ct, labels, "CT volume vs label map");
  require_same_geometry(labels, infection, "label map vs infection mask");

  // One pass: per-code totals and infected counts, per-band lung counts.
  std::array<std::uint64_t, kMaxLabelCode + 1> total{};
  std::array<std::uint64_t, kMaxLabelCode + 1> infected{};
  std::array<std::uint64_t, kHuBands.size()> band{};
  const auto hu = ct.data();
  const auto l = labels.data();
  const auto f = infection.data();
  for (std::size_t i = 0; i < hu.size(); ++i) {
    const std::uint8_t code = l[i];
    if (code == 0) {
      if (f[i] != 0) throw InvalidInputError("infection voxel " + std::to_string(i) + " lies outside the lung");
      continue;
    }
    ++total[code];
    infected[code] += f[i];
    const double v = hu[i];
    for (std::size_t b = 0; b < kHuBands.size(); ++b) {
      if (kHuBands[b].contains(v)) {
        ++band[b];
        break;
      }
    }
  }

  const Spacing& sp = ct.spacing();
  auto count_in = [](const std::array<std::uint64_t, kMaxLabelCode + 1>& counts, const LabelSet& codes) {
    std::uint64_t n = 0;
    for (int c = 1; c <= kMaxLabelCode; ++c) n += codes.test(static_cast<std::size_t>(c)) ? counts[c] : 0;
    return n;
  };

  const std::uint64_t lung = count_in(total, RegionSelector::whole_lung().codes(map));
  if (lung == 0) throw DegenerateError("empty lung: V(WL) = 0");

  FeatureVector fv;
  fv[1] = physical_volume(lung, sp);
  fv[2] = physical_volume(count_in(total, RegionSelector::right_lung().codes(map)), sp);
  fv[3] = physical_volume(count_in(total, RegionSelector::left_lung().codes(map)), sp);

  FeatureId id = kFirstInfectionId;
  for (const RegionSelector& sel : regions()) {
    const LabelSet codes = sel.codes(map);
    const std::uint64_t n = count_in(total, codes);
    const std::uint64_t k = count_in(infected, codes);
    fv[id] = physical_volume(k, sp);
    if (n == 0) {
      warn("region " + sel.name() + " has zero volume; infection ratio set to 0");
      fv[id + 1] = 0.0;
    } else {
      fv[id + 1] = static_cast<double>(k) / static_cast<double>(n);
    }
    id += 2;
  }

  for (std::size_t b = 0; b < kHuBands.size(); ++b) {
    fv[id] = physical_volume(band[b], sp);
    fv[id + 1] = static_cast<double>(band[b]) / static_cast<double>(lung);
    id += 2;
  }
  if (id != kFeatureCount + 1) throw InvariantViolation("feature layout does not cover 63 ids");
  return fv;
}

}  // namespace ctsev
