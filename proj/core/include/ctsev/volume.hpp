#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ctsev/error.hpp"

namespace ctsev {

struct Dims {
  std::int64_t nx = 0;
  std::int64_t ny = 0;
  std::int64_t nz = 0;

  std::int64_t voxel_count() const { return nx * ny * nz; }
  bool operator==(const Dims&) const = default;
};

// Millimetres per voxel along each axis.
struct Spacing {
  double x = 1.0;
  double y = 1.0;
  double z = 1.0;

  bool is_valid() const { return x > 0.0 && y > 0.0 && z > 0.0; }
  double voxel_mm3() const { return x * y * z; }
  bool operator==(const Spacing&) const = default;
};

// Dense x-fastest grid. Immutable once built.
template <typename T>
class VoxelGrid {
 public:
  using value_type = T;

  VoxelGrid(Dims dims, Spacing spacing, std::vector<T> data)
      : dims_(dims), spacing_(spacing), data_(std::move(data)) {
    if (dims_.nx <= 0 || dims_.ny <= 0 || dims_.nz <= 0) {
      throw InvalidGeometryError("grid dims must be positive");
    }
    if (!spacing_.is_valid()) {
      throw InvalidGeometryError("grid spacing must be strictly positive");
    }
    if (static_cast<std::int64_t>(data_.size()) != dims_.voxel_count()) {
      throw InvalidGeometryError("grid data length " + std::to_string(data_.size()) +
                                 " != dims product " +
                                 std::to_string(dims_.voxel_count()));
    }
  }

  const Dims& dims() const { return dims_; }
  const Spacing& spacing() const { return spacing_; }
  std::span<const T> data() const { return data_; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return static_cast<std::size_t>((z * dims_.ny + y) * dims_.nx + x);
  }
  T at(std::int64_t x, std::int64_t y, std::int64_t z) const { return data_[index(x, y, z)]; }
  T operator[](std::size_t i) const { return data_[i]; }

 private:
  Dims dims_;
  Spacing spacing_;
  std::vector<T> data_;
};

// Hounsfield units.
class CtVolume : public VoxelGrid<std::int16_t> {
 public:
  using VoxelGrid::VoxelGrid;
};

inline constexpr std::uint8_t kMaxLabelCode = 18;
inline constexpr int kSegmentCount = 18;
inline constexpr int kRightSegmentCount = 10;

// 0 = outside lung, 1..10 = RS1..RS10, 11..18 = LS1..LS8.
class RegionLabelMap : public VoxelGrid<std::uint8_t> {
 public:
  RegionLabelMap(Dims dims, Spacing spacing, std::vector<std::uint8_t> labels);
};

class InfectionMask : public VoxelGrid<std::uint8_t> {
 public:
  InfectionMask(Dims dims, Spacing spacing, std::vector<std::uint8_t> flags);
};

template <typename A, typename B>
void require_same_geometry(const VoxelGrid<A>& a, const VoxelGrid<B>& b, const char* what) {
  if (!(a.dims() == b.dims()) || !(a.spacing() == b.spacing())) {
    throw InvalidInputError(std::string("geometry mismatch: ") + what);
  }
}

// Every infection-flagged voxel must carry a nonzero lung label.
void require_infection_within_lung(const RegionLabelMap& labels, const InfectionMask& infection);

enum class Lobe : std::uint8_t { RightSuperior, RightMiddle, RightInferior, LeftSuperior, LeftInferior };
inline constexpr int kLobeCount = 5;

const char* lobe_name(Lobe lobe);  // "RB_S", ...

// Segment code -> lobe assignment. The default follows the common
// RS1-3/RS4-5/RS6-10, LS1-4/LS5-8 convention; conventions for the left lung
// vary, so it can be replaced from config.
class LobeMap {
 public:
  LobeMap();  // default mapping

  // Throws SpecError unless every segment code maps to exactly one lobe on
  // its own side of the lung.
  static LobeMap from_segments(const std::array<std::vector<int>, kLobeCount>& segments_per_lobe);
  static LobeMap from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  Lobe lobe_of(std::uint8_t segment_code) const { return lobe_of_[segment_code]; }
  bool operator==(const LobeMap&) const = default;

 private:
  std::array<Lobe, kMaxLabelCode + 1> lobe_of_{};
};

const LobeMap& default_lobe_map();

using LabelSet = std::bitset<kMaxLabelCode + 1>;

enum class RegionKind : std::uint8_t { WholeLung, RightLung, LeftLung, Lobe, Segment };

class RegionSelector {
 public:
  static RegionSelector whole_lung() { return {RegionKind::WholeLung, 0}; }
  static RegionSelector right_lung() { return {RegionKind::RightLung, 0}; }
  static RegionSelector left_lung() { return {RegionKind::LeftLung, 0}; }
  static RegionSelector lobe(Lobe l) { return {RegionKind::Lobe, static_cast<int>(l)}; }
  // code in 1..18
  static RegionSelector segment(int code);

  RegionKind kind() const { return kind_; }
  LabelSet codes(const LobeMap& map = default_lobe_map()) const;
  std::string name() const;  // WL, RL, LL, RB_S, ..., RS1, ..., LS8

 private:
  RegionSelector(RegionKind kind, int index) : kind_(kind), index_(index) {}
  RegionKind kind_;
  int index_;
};

// Millilitres occupied by `voxel_count` voxels of the given spacing.
double physical_volume(std::uint64_t voxel_count, const Spacing& spacing);

std::uint64_t region_voxel_count(const RegionLabelMap& labels, const RegionSelector& sel,
                                 const LobeMap& map = default_lobe_map());
// Counts only voxels flagged in `restrict_to`.
std::uint64_t region_voxel_count(const RegionLabelMap& labels, const RegionSelector& sel,
                                 const InfectionMask& restrict_to,
                                 const LobeMap& map = default_lobe_map());

}  // namespace ctsev
