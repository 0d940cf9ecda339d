#include "ctsev/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "ctsev/features.hpp"
#include "ctsev/random.hpp"

namespace ctsev {
namespace {

constexpr double kFractionSumTolerance = 1e-9;
constexpr int kMinHu = -1024;
constexpr int kMaxHu = 3071;

// Integer HU range covered by a half-open band, clipped to the scanner range.
std::pair<int, int> integer_range(const HuBand& band) {
  const int lo = std::isinf(band.lower) ? kMinHu : static_cast<int>(std::ceil(band.lower));
  const int hi = std::isinf(band.upper) ? kMaxHu : static_cast<int>(std::ceil(band.upper)) - 1;
  return {lo, hi};
}

std::int16_t sample_in_band(Rng& rng, const TissueModel& model, const HuBand& band) {
  const auto [lo, hi] = integer_range(band);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double v = std::round(rng.normal(model.mean_hu, model.sd_hu));
    if (v >= lo && v <= hi) return static_cast<std::int16_t>(v);
  }
  const double v = std::round(rng.normal(model.mean_hu, model.sd_hu));
  return static_cast<std::int16_t>(std::clamp(v, static_cast<double>(lo), static_cast<double>(hi)));
}

std::int16_t sample_unclipped(Rng& rng, const TissueModel& model) {
  const double v = std::round(rng.normal(model.mean_hu, model.sd_hu));
  return static_cast<std::int16_t>(std::clamp(v, -32768.0, 32767.0));
}

void check_fraction(double v, const std::string& field) {
  if (!(v >= 0.0 && v <= 1.0)) throw SpecError("phantom spec '" + field + "' = " + std::to_string(v) + " outside [0,1]");
}

void check_band_model(const TissueModel& m, TissueClass tissue) {
  const HuBand& band = hu_band(tissue);
  const auto [lo, hi] = integer_range(band);
  if (!(m.mean_hu > band.lower && m.mean_hu < band.upper) || m.mean_hu < lo || m.mean_hu > hi) {
    throw SpecError(std::string("phantom spec: ") + tissue_name(tissue) + " mean " + std::to_string(m.mean_hu) +
                    " HU is not strictly inside its band");
  }
  if (!(m.sd_hu >= 0.0) || !std::isfinite(m.sd_hu)) {
    throw SpecError(std::string("phantom spec: ") + tissue_name(tissue) + " sd must be finite and >= 0");
  }
}

// Exact per-bucket counts from cumulative rounding of `fractions` * n.
std::vector<std::size_t> apportion(std::size_t n, std::span<const double> fractions) {
  std::vector<std::size_t> counts(fractions.size());
  double cumulative = 0.0;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    cumulative += fractions[i];
    std::size_t upto = i + 1 == fractions.size()
                           ? n
                           : static_cast<std::size_t>(std::llround(std::min(cumulative, 1.0) * static_cast<double>(n)));
    upto = std::max(upto, assigned);
    counts[i] = upto - assigned;
    assigned = upto;
  }
  return counts;
}

}  // namespace

void PhantomSpec::validate() const {
  if (dims.nx <= 0 || dims.ny <= 0 || dims.nz <= 0) throw SpecError("phantom spec 'dims' must be positive");
  if (!spacing.is_valid()) throw SpecError("phantom spec 'spacing' must be strictly positive");
  if (!(lung_extent > 0.0 && lung_extent <= 1.0)) throw SpecError("phantom spec 'lung_extent' must be in (0,1]");
  double sum = 0.0;
  for (int s = 0; s < kSegmentCount; ++s) {
    check_fraction(segment_fractions[s], "segment_fractions[" + std::to_string(s) + "]");
    check_fraction(infection_fractions[s], "infection_fractions[" + std::to_string(s) + "]");
    sum += segment_fractions[s];
  }
  if (std::abs(sum - 1.0) > kFractionSumTolerance) {
    throw SpecError("phantom spec 'segment_fractions' sum to " + std::to_string(sum) + ", expected 1");
  }
  check_fraction(ggo_share, "ggo_share");
  check_fraction(vessel_fraction, "vessel_fraction");
  check_band_model(normal, TissueClass::Normal);
  check_band_model(ggo, TissueClass::Ggo);
  check_band_model(consolidation, TissueClass::Consolidation);
  check_band_model(calcification, TissueClass::Calcification);
  if (!std::isfinite(outside.mean_hu) || !(outside.sd_hu >= 0.0)) throw SpecError("phantom spec 'outside' invalid");
}

namespace {

TissueModel tissue_from_json(const nlohmann::json& j, TissueModel fallback) {
  if (j.contains("mean_hu")) fallback.mean_hu = j.at("mean_hu").get<double>();
  if (j.contains("sd_hu")) fallback.sd_hu = j.at("sd_hu").get<double>();
  return fallback;
}

nlohmann::json tissue_to_json(const TissueModel& m) { return {{"mean_hu", m.mean_hu}, {"sd_hu", m.sd_hu}}; }

template <typename Array>
void fractions_from_json(const nlohmann::json& j, const char* key, Array& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (v.is_number()) {
    out.fill(v.get<double>());
    return;
  }
  if (!v.is_array() || v.size() != out.size()) {
    throw SpecError(std::string("phantom spec '") + key + "' must be a number or an array of 18 numbers");
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i].get<double>();
}

}  // namespace

PhantomSpec PhantomSpec::from_json(const nlohmann::json& j) {
  PhantomSpec spec;
  try {
    if (j.contains("dims")) {
      const auto& d = j.at("dims");
      if (!d.is_array() || d.size() != 3) throw SpecError("phantom spec 'dims' must be 3 integers");
      spec.dims = {d[0].get<std::int64_t>(), d[1].get<std::int64_t>(), d[2].get<std::int64_t>()};
    }
    if (j.contains("spacing_mm")) {
      const auto& s = j.at("spacing_mm");
      if (!s.is_array() || s.size() != 3) throw SpecError("phantom spec 'spacing_mm' must be 3 reals");
      spec.spacing = {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
    }
    if (j.contains("lung_extent")) spec.lung_extent = j.at("lung_extent").get<double>();
    fractions_from_json(j, "segment_fractions", spec.segment_fractions);
    fractions_from_json(j, "infection_fractions", spec.infection_fractions);
    if (j.contains("ggo_share")) spec.ggo_share = j.at("ggo_share").get<double>();
    if (j.contains("vessel_fraction")) spec.vessel_fraction = j.at("vessel_fraction").get<double>();
    if (j.contains("tissue")) {
      const auto& t = j.at("tissue");
      if (t.contains("normal")) spec.normal = tissue_from_json(t.at("normal"), spec.normal);
      if (t.contains("ggo")) spec.ggo = tissue_from_json(t.at("ggo"), spec.ggo);
      if (t.contains("consolidation")) spec.consolidation = tissue_from_json(t.at("consolidation"), spec.consolidation);
      if (t.contains("calcification")) spec.calcification = tissue_from_json(t.at("calcification"), spec.calcification);
      if (t.contains("outside")) spec.outside = tissue_from_json(t.at("outside"), spec.outside);
    }
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("phantom spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::json PhantomSpec::to_json() const {
  return {{"dims", {dims.nx, dims.ny, dims.nz}},
          {"spacing_mm", {spacing.x, spacing.y, spacing.z}},
          {"lung_extent", lung_extent},
          {"segment_fractions", segment_fractions},
          {"infection_fractions", infection_fractions},
          {"ggo_share", ggo_share},
          {"vessel_fraction", vessel_fraction},
          {"tissue",
           {{"normal", tissue_to_json(normal)},
            {"ggo", tissue_to_json(ggo)},
            {"consolidation", tissue_to_json(consolidation)},
            {"calcification", tissue_to_json(calcification)},
            {"outside", tissue_to_json(outside)}}},
          {"seed", seed}};
}

Phantom generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  const Dims d = spec.dims;
  const auto n = static_cast<std::size_t>(d.voxel_count());

  // Lung voxels in (x, z, y) order so the low-x share forms the right lung.
  const double cx = 0.5 * static_cast<double>(d.nx - 1);
  const double cy = 0.5 * static_cast<double>(d.ny - 1);
  const double cz = 0.5 * static_cast<double>(d.nz - 1);
  const double ax = std::max(0.5, spec.lung_extent * 0.5 * static_cast<double>(d.nx));
  const double ay = std::max(0.5, spec.lung_extent * 0.5 * static_cast<double>(d.ny));
  const double az = std::max(0.5, spec.lung_extent * 0.5 * static_cast<double>(d.nz));

  auto linear = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
    return static_cast<std::size_t>((z * d.ny + y) * d.nx + x);
  };

  std::vector<std::size_t> lung;
  for (std::int64_t x = 0; x < d.nx; ++x) {
    for (std::int64_t z = 0; z < d.nz; ++z) {
      for (std::int64_t y = 0; y < d.ny; ++y) {
        const double ux = (static_cast<double>(x) - cx) / ax;
        const double uy = (static_cast<double>(y) - cy) / ay;
        const double uz = (static_cast<double>(z) - cz) / az;
        if (ux * ux + uy * uy + uz * uz <= 1.0) lung.push_back(linear(x, y, z));
      }
    }
  }
  if (lung.empty()) throw SpecError("phantom spec produces an empty lung");

  const double right_share = std::accumulate(spec.segment_fractions.begin(),
                                             spec.segment_fractions.begin() + kRightSegmentCount, 0.0);
  const std::array<double, 2> side_shares{right_share, 1.0 - right_share};
  const auto side_counts = apportion(lung.size(), side_shares);

  std::vector<std::uint8_t> labels(n, 0);
  std::array<std::vector<std::size_t>, kSegmentCount + 1> segment_voxels;

  auto assign_side = [&](std::vector<std::size_t> voxels, int first_code, int code_count) {
    // Linear index is z-major, so sorting yields slabs along z.
    std::sort(voxels.begin(), voxels.end());
    std::vector<double> shares(static_cast<std::size_t>(code_count));
    double side_total = 0.0;
    for (int i = 0; i < code_count; ++i) side_total += spec.segment_fractions[first_code - 1 + i];
    for (int i = 0; i < code_count; ++i) {
      shares[i] = side_total > 0.0 ? spec.segment_fractions[first_code - 1 + i] / side_total : 0.0;
    }
    if (side_total <= 0.0 && !voxels.empty()) {
      throw InvariantViolation("lung side with voxels but zero segment share");
    }
    const auto counts = apportion(voxels.size(), shares);
    std::size_t pos = 0;
    for (int i = 0; i < code_count; ++i) {
      const int code = first_code + i;
      for (std::size_t k = 0; k < counts[i]; ++k, ++pos) {
        labels[voxels[pos]] = static_cast<std::uint8_t>(code);
        segment_voxels[code].push_back(voxels[pos]);
      }
    }
  };
  assign_side({lung.begin(), lung.begin() + static_cast<std::ptrdiff_t>(side_counts[0])}, 1, kRightSegmentCount);
  assign_side({lung.begin() + static_cast<std::ptrdiff_t>(side_counts[0]), lung.end()}, kRightSegmentCount + 1,
              kSegmentCount - kRightSegmentCount);

  Rng rng(spec.seed);
  std::vector<std::uint8_t> infection(n, 0);
  for (int code = 1; code <= kSegmentCount; ++code) {
    auto& voxels = segment_voxels[code];
    const auto k = static_cast<std::size_t>(
        std::llround(spec.infection_fractions[code - 1] * static_cast<double>(voxels.size())));
    // Partial Fisher-Yates: the first k entries become the infected set.
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng.below(voxels.size() - i);
      std::swap(voxels[i], voxels[j]);
      infection[voxels[i]] = 1;
    }
  }

  std::vector<std::int16_t> hu(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] == 0) {
      hu[i] = sample_unclipped(rng, spec.outside);
    } else if (infection[i] != 0) {
      hu[i] = rng.uniform() < spec.ggo_share ? sample_in_band(rng, spec.ggo, hu_band(TissueClass::Ggo))
                                             : sample_in_band(rng, spec.consolidation, hu_band(TissueClass::Consolidation));
    } else {
      hu[i] = rng.uniform() < spec.vessel_fraction
                  ? sample_in_band(rng, spec.calcification, hu_band(TissueClass::Calcification))
                  : sample_in_band(rng, spec.normal, hu_band(TissueClass::Normal));
    }
  }

  return Phantom{CtVolume(d, spec.spacing, std::move(hu)), RegionLabelMap(d, spec.spacing, std::move(labels)),
                 InfectionMask(d, spec.spacing, std::move(infection))};
}

}  // namespace ctsev
