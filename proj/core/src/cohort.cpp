#include "ctsev/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "ctsev/random.hpp"

namespace ctsev {
namespace {

FeatureDistribution baseline(FeatureId id) {
  if (id == 1) return {4000.0, 600.0};
  if (id == 2 || id == 3) return {2000.0, 300.0};
  if (id >= 56) {
    // HU bands: normal, GGO, consolidation, calcification.
    static constexpr std::array<FeatureDistribution, 4> volumes{{{3000, 500}, {500, 200}, {200, 100}, {60, 30}}};
    static constexpr std::array<FeatureDistribution, 4> ratios{{{0.72, 0.10}, {0.15, 0.06}, {0.06, 0.03}, {0.02, 0.01}}};
    const int band = (id - 56) / 2;
    return feature_kind(id) == FeatureKind::Volume ? volumes[band] : ratios[band];
  }
  return feature_kind(id) == FeatureKind::Volume ? FeatureDistribution{40.0, 20.0} : FeatureDistribution{0.06, 0.03};
}

std::string patient_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "P%03zu", index + 1);
  return buf;
}

}  // namespace

CohortSpec::CohortSpec() {
  for (FeatureId id = 1; id <= kFeatureCount; ++id) {
    non_severe[id - 1] = baseline(id);
    severe[id - 1] = baseline(id);
  }
  phantom_base.dims = {16, 16, 16};
}

CohortSpec CohortSpec::with_signal(std::span<const FeatureId> signal, double separation) {
  CohortSpec spec;
  for (FeatureId id : signal) {
    if (!is_valid_feature_id(id)) throw SpecError("cohort signal id " + std::to_string(id) + " outside 1..63");
    auto& d = spec.severe[id - 1];
    d.mean += separation * d.sd;
  }
  return spec;
}

void CohortSpec::validate() const {
  for (int i = 0; i < kFeatureCount; ++i) {
    for (const auto* d : {&non_severe[i], &severe[i]}) {
      if (!std::isfinite(d->mean) || !(d->sd >= 0.0) || !std::isfinite(d->sd)) {
        throw SpecError("cohort spec: feature " + feature_column(i + 1) + " has an invalid distribution");
      }
    }
  }
  for (int c = 0; c < kClassCount; ++c) {
    if (!(phantom_infection_mean[c] >= 0.0 && phantom_infection_mean[c] <= 1.0)) {
      throw SpecError("cohort spec: phantom infection mean outside [0,1]");
    }
    if (!(phantom_ggo_share[c] >= 0.0 && phantom_ggo_share[c] <= 1.0)) {
      throw SpecError("cohort spec: phantom GGO share outside [0,1]");
    }
  }
}

CohortSpec CohortSpec::from_json(const nlohmann::json& j) {
  CohortSpec spec;
  try {
    if (j.contains("signal_ids") || j.contains("separation")) {
      const auto ids = j.value("signal_ids", std::vector<FeatureId>{});
      spec = with_signal(ids, j.value("separation", 0.0));
    }
    if (j.contains("mode")) {
      const auto mode = j.at("mode").get<std::string>();
      if (mode == "distribution") spec.mode = CohortMode::Distribution;
      else if (mode == "phantom") spec.mode = CohortMode::Phantom;
      else throw SpecError("cohort spec: mode must be 'distribution' or 'phantom'");
    }
    if (j.contains("phantom_infection_mean")) {
      spec.phantom_infection_mean = j.at("phantom_infection_mean").get<std::array<double, kClassCount>>();
    }
    if (j.contains("phantom_ggo_share")) {
      spec.phantom_ggo_share = j.at("phantom_ggo_share").get<std::array<double, kClassCount>>();
    }
    if (j.contains("phantom")) spec.phantom_base = PhantomSpec::from_json(j.at("phantom"));
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("cohort spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

Dataset synth_cohort(const CohortSpec& spec, std::size_t n_non_severe, std::size_t n_severe, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = n_non_severe + n_severe;
  std::vector<double> values;
  values.reserve(n * kFeatureCount);
  std::vector<Label> labels;
  labels.reserve(n);
  std::vector<std::string> names;
  names.reserve(n);

  for (std::size_t r = 0; r < n; ++r) {
    const Label label = r < n_non_severe ? Label::NonSevere : Label::Severe;
    Rng rng(derive_seed(seed, r));
    labels.push_back(label);
    names.push_back(patient_name(r));
    if (spec.mode == CohortMode::Distribution) {
      const auto& dists = label == Label::Severe ? spec.severe : spec.non_severe;
      for (FeatureId id = 1; id <= kFeatureCount; ++id) {
        double v = rng.normal(dists[id - 1].mean, dists[id - 1].sd);
        v = feature_kind(id) == FeatureKind::Ratio ? std::clamp(v, 0.0, 1.0) : std::max(0.0, v);
        values.push_back(v);
      }
    } else {
      PhantomSpec ps = spec.phantom_base;
      const double mean = spec.phantom_infection_mean[class_index(label)];
      for (double& f : ps.infection_fractions) f = std::min(1.0, rng.uniform(0.0, 2.0 * mean));
      ps.ggo_share = spec.phantom_ggo_share[class_index(label)];
      ps.seed = rng.next();
      const Phantom p = generate_phantom(ps);
      const FeatureVector fv = extract_features(p.ct, p.labels, p.infection);
      values.insert(values.end(), fv.values().begin(), fv.values().end());
    }
  }
  return Dataset(all_feature_ids(), std::move(values), std::move(labels), std::move(names));
}

}  // namespace ctsev
