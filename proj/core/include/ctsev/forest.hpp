#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ctsev/dataset.hpp"
#include "ctsev/tree.hpp"

namespace ctsev {

struct ForestParams {
  int trees = 500;
  TreeParams tree;
  // Class-inverse sample weights (weighted random forest). Off gives the
  // plain forest with unit weights.
  bool class_weighting = true;

  bool operator==(const ForestParams&) const = default;
};

struct ClassWeights {
  std::array<double, kClassCount> per_class{1.0, 1.0};

  double of(Label l) const { return per_class[class_index(l)]; }
  bool operator==(const ClassWeights&) const = default;
};

// weight_c = N / (2 * N_c); mean per-sample weight is 1. Throws
// InvalidInputError when a class is missing.
ClassWeights class_weights(std::span<const Label> labels);

class Forest {
 public:
  Forest(ForestParams params, std::uint64_t seed, ClassWeights weights, std::vector<FeatureId> feature_ids,
         std::vector<DecisionTree> trees, double decision_threshold = 0.5);

  const ForestParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  const ClassWeights& class_weights() const { return weights_; }
  const std::vector<FeatureId>& feature_ids() const { return feature_ids_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  double decision_threshold() const { return decision_threshold_; }
  std::span<const int> column_of_feature() const { return column_of_; }

  bool operator==(const Forest& o) const {
    return params_ == o.params_ && seed_ == o.seed_ && weights_ == o.weights_ && feature_ids_ == o.feature_ids_ &&
           trees_ == o.trees_ && decision_threshold_ == o.decision_threshold_;
  }

 private:
  ForestParams params_;
  std::uint64_t seed_;
  ClassWeights weights_;
  std::vector<FeatureId> feature_ids_;
  std::vector<DecisionTree> trees_;
  double decision_threshold_;
  std::array<int, kFeatureCount + 1> column_of_{};
};

// Tree t trains on a bootstrap resample drawn from its own stream
// derive_seed(seed, t); output is independent of `jobs`.
Forest fit_forest(const Dataset& data, const ForestParams& params, std::uint64_t seed, int jobs = 1);

// `row` holds values in forest.feature_ids() order. Mean leaf severe fraction.
double predict_score(const Forest& forest, std::span<const double> row);
// Looks up the forest's active ids; InvalidInputError if one is non-finite.
double predict_score(const Forest& forest, const FeatureVector& features);
// Scores every row, mapping the forest's ids onto the dataset's columns.
std::vector<double> predict_scores(const Forest& forest, const Dataset& data);

// Severe iff score >= threshold.
Label label_for_score(double score, double threshold);
Label predict(const Forest& forest, const FeatureVector& features);
Label predict(const Forest& forest, const FeatureVector& features, double threshold);

}  // namespace ctsev
