#pragma once

#include <array>
#include <cstdint>
#include <span>

#include <nlohmann/json_fwd.hpp>

#include "ctsev/dataset.hpp"
#include "ctsev/phantom.hpp"

namespace ctsev {

struct FeatureDistribution {
  double mean = 0.0;
  double sd = 1.0;
};

enum class CohortMode {
  // Independent normal draws per feature; ratios clamped to [0,1], volumes
  // to >= 0. Cheap, but ignores the additivity between regions.
  Distribution,
  // Small generated phantoms per patient run through extract_features, so
  // every row satisfies the feature invariants.
  Phantom,
};

struct CohortSpec {
  CohortMode mode = CohortMode::Distribution;
  // Distribution mode, indexed by feature id - 1.
  std::array<FeatureDistribution, kFeatureCount> non_severe;
  std::array<FeatureDistribution, kFeatureCount> severe;
  // Phantom mode: mean per-segment infection fraction per class; each
  // patient's segments draw uniformly from [0, 2 * mean] (clamped to 1).
  std::array<double, kClassCount> phantom_infection_mean{0.05, 0.25};
  // Phantom mode: GGO share of infected voxels per class.
  std::array<double, kClassCount> phantom_ggo_share{0.75, 0.65};
  PhantomSpec phantom_base;

  CohortSpec();

  // Baseline distributions for both classes with the severe mean of every
  // id in `signal` shifted up by `separation` standard deviations.
  static CohortSpec with_signal(std::span<const FeatureId> signal, double separation);
  static CohortSpec null_cohort() { return {}; }

  void validate() const;
  static CohortSpec from_json(const nlohmann::json& j);
};

// Non-severe rows first, then severe; rows named P001, P002, ...
Dataset synth_cohort(const CohortSpec& spec, std::size_t n_non_severe, std::size_t n_severe, std::uint64_t seed);

}  // namespace ctsev
