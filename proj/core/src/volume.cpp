#include "ctsev/volume.hpp"

#include <nlohmann/json.hpp>

namespace ctsev {

RegionLabelMap::RegionLabelMap(Dims dims, Spacing spacing, std::vector<std::uint8_t> labels)
    : VoxelGrid(dims, spacing, std::move(labels)) {
  const auto values = data();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > kMaxLabelCode) {
      throw InvalidInputError("label code " + std::to_string(values[i]) + " at voxel " +
                              std::to_string(i) + " is outside 0..18");
    }
  }
}

InfectionMask::InfectionMask(Dims dims, Spacing spacing, std::vector<std::uint8_t> flags)
    : VoxelGrid(dims, spacing, std::move(flags)) {
  const auto values = data();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 1) {
      throw InvalidInputError("infection flag " + std::to_string(values[i]) + " at voxel " +
                              std::to_string(i) + " is not 0 or 1");
    }
  }
}

void require_infection_within_lung(const RegionLabelMap& labels, const InfectionMask& infection) {
  require_same_geometry(labels, infection, "label map vs infection mask");
  const auto l = labels.data();
  const auto f = infection.data();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] != 0 && l[i] == 0) {
      throw InvalidInputError("infection voxel " + std::to_string(i) + " lies outside the lung");
    }
  }
}

const char* lobe_name(Lobe lobe) {
  switch (lobe) {
    case Lobe::RightSuperior: return "RB_S";
    case Lobe::RightMiddle: return "RB_M";
    case Lobe::RightInferior: return "RB_I";
    case Lobe::LeftSuperior: return "LB_S";
    case Lobe::LeftInferior: return "LB_I";
  }
  return "?";
}

namespace {

bool is_right_lobe(Lobe l) {
  return l == Lobe::RightSuperior || l == Lobe::RightMiddle || l == Lobe::RightInferior;
}

}  // namespace

LobeMap::LobeMap() {
  for (int code = 1; code <= kMaxLabelCode; ++code) {
    Lobe l;
    if (code <= 3) l = Lobe::RightSuperior;
    else if (code <= 5) l = Lobe::RightMiddle;
    else if (code <= 10) l = Lobe::RightInferior;
    else if (code <= 14) l = Lobe::LeftSuperior;
    else l = Lobe::LeftInferior;
    lobe_of_[code] = l;
  }
}

LobeMap LobeMap::from_segments(const std::array<std::vector<int>, kLobeCount>& segments_per_lobe) {
  LobeMap map;
  std::array<int, kMaxLabelCode + 1> seen{};
  for (int li = 0; li < kLobeCount; ++li) {
    const auto lobe = static_cast<Lobe>(li);
    for (int code : segments_per_lobe[li]) {
      if (code < 1 || code > kMaxLabelCode) {
        throw SpecError(std::string("lobe map ") + lobe_name(lobe) + ": segment code " +
                        std::to_string(code) + " outside 1..18");
      }
      const bool right_code = code <= kRightSegmentCount;
      if (right_code != is_right_lobe(lobe)) {
        throw SpecError(std::string("lobe map ") + lobe_name(lobe) + ": segment code " +
                        std::to_string(code) + " belongs to the other lung");
      }
      ++seen[code];
      map.lobe_of_[code] = lobe;
    }
  }
  for (int code = 1; code <= kMaxLabelCode; ++code) {
    if (seen[code] != 1) {
      throw SpecError("lobe map: segment code " + std::to_string(code) + " assigned " +
                      std::to_string(seen[code]) + " times (must be exactly once)");
    }
  }
  return map;
}

LobeMap LobeMap::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SpecError("lobe map must be a JSON object");
  std::array<std::vector<int>, kLobeCount> segments;
  for (int li = 0; li < kLobeCount; ++li) {
    const char* key = lobe_name(static_cast<Lobe>(li));
    if (!j.contains(key) || !j.at(key).is_array()) {
      throw SpecError(std::string("lobe map: missing array '") + key + "'");
    }
    for (const auto& v : j.at(key)) {
      if (!v.is_number_integer()) {
        throw SpecError(std::string("lobe map '") + key + "': codes must be integers");
      }
      segments[li].push_back(v.get<int>());
    }
  }
  return from_segments(segments);
}

nlohmann::json LobeMap::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (int li = 0; li < kLobeCount; ++li) j[lobe_name(static_cast<Lobe>(li))] = nlohmann::json::array();
  for (int code = 1; code <= kMaxLabelCode; ++code) j[lobe_name(lobe_of_[code])].push_back(code);
  return j;
}

const LobeMap& default_lobe_map() {
  static const LobeMap map;
  return map;
}

RegionSelector RegionSelector::segment(int code) {
  if (code < 1 || code > kMaxLabelCode) {
    throw InvalidInputError("segment code " + std::to_string(code) + " outside 1..18");
  }
  return {RegionKind::Segment, code};
}

LabelSet RegionSelector::codes(const LobeMap& map) const {
  LabelSet set;
  switch (kind_) {
    case RegionKind::WholeLung:
      for (int c = 1; c <= kMaxLabelCode; ++c) set.set(c);
      break;
    case RegionKind::RightLung:
      for (int c = 1; c <= kRightSegmentCount; ++c) set.set(c);
      break;
    case RegionKind::LeftLung:
      for (int c = kRightSegmentCount + 1; c <= kMaxLabelCode; ++c) set.set(c);
      break;
    case RegionKind::Lobe:
      for (int c = 1; c <= kMaxLabelCode; ++c) {
        if (map.lobe_of(static_cast<std::uint8_t>(c)) == static_cast<Lobe>(index_)) set.set(c);
      }
      break;
    case RegionKind::Segment:
      set.set(index_);
      break;
  }
  return set;
}

std::string RegionSelector::name() const {
  switch (kind_) {
    case RegionKind::WholeLung: return "WL";
    case RegionKind::RightLung: return "RL";
    case RegionKind::LeftLung: return "LL";
    case RegionKind::Lobe: return lobe_name(static_cast<Lobe>(index_));
    case RegionKind::Segment:
      return index_ <= kRightSegmentCount ? "RS" + std::to_string(index_)
                                          : "LS" + std::to_string(index_ - kRightSegmentCount);
  }
  return "?";
}

double physical_volume(std::uint64_t voxel_count, const Spacing& spacing) {
  if (!spacing.is_valid()) throw InvalidGeometryError("voxel spacing must be strictly positive");
  return static_cast<double>(voxel_count) * spacing.voxel_mm3() / 1000.0;
}

std::uint64_t region_voxel_count(const RegionLabelMap& labels, const RegionSelector& sel,
                                 const LobeMap& map) {
  const LabelSet codes = sel.codes(map);
  std::uint64_t n = 0;
  for (std::uint8_t code : labels.data()) n += codes.test(code) ? 1 : 0;
  return n;
}

std::uint64_t region_voxel_count(const RegionLabelMap& labels, const RegionSelector& sel,
                                 const InfectionMask& restrict_to, const LobeMap& map) {
  require_same_geometry(labels, restrict_to, "label map vs infection mask");
  const LabelSet codes = sel.codes(map);
  const auto l = labels.data();
  const auto f = restrict_to.data();
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < l.size(); ++i) n += (f[i] != 0 && codes.test(l[i])) ? 1 : 0;
  return n;
}

}  // namespace ctsev
