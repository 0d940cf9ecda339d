#pragma once

// Slow reference implementations used as test oracles. They share no code
// with the library beyond its data types.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "ctsev/dataset.hpp"
#include "ctsev/forest.hpp"
#include "ctsev/importance.hpp"
#include "ctsev/volume.hpp"

namespace ctsev::oracle {

// All 63 features by direct per-region voxel scans, default lobe mapping.
std::array<double, kFeatureCount> naive_features(const CtVolume& ct, const RegionLabelMap& labels,
                                                 const InfectionMask& infection);

double naive_gini(std::span<const double> histogram);

struct NaiveSplit {
  FeatureId feature_id = 0;
  double lower = 0.0;  // largest value going left
  double upper = 0.0;  // smallest value going right
  double cost = 0.0;
};

// Every (feature, consecutive distinct value pair) evaluated by rescanning the
// rows. Same acceptance and tie rules as CART: strict improvement over the
// parent, ties to the lower feature id then the lower threshold.
std::optional<NaiveSplit> exhaustive_best_split(const Dataset& data, std::span<const double> weights,
                                                std::span<const std::size_t> rows,
                                                std::span<const FeatureId> candidates, double min_child_weight,
                                                double tie_tolerance);

// Mean decrease over nodes splitting on `id`, recomputed from the node
// histograms by an explicit depth-first walk of every tree.
double node_walk_reduced_gini(const Forest& forest, FeatureId id, DecreaseMode mode);

// Pairwise U / (n+ n-), ties counted one half.
double mann_whitney_auc(std::span<const Label> truth, std::span<const double> scores, Label positive);

}  // namespace ctsev::oracle
