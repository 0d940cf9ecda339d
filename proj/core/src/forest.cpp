#include "ctsev/forest.hpp"

#include <cmath>

#include "ctsev/parallel.hpp"
#include "ctsev/random.hpp"

namespace ctsev {

ClassWeights class_weights(std::span<const Label> labels) {
  std::array<std::size_t, kClassCount> counts{};
  for (Label l : labels) ++counts[class_index(l)];
  for (int c = 0; c < kClassCount; ++c) {
    if (counts[c] == 0) {
      throw InvalidInputError(std::string("training set has no '") + label_name(static_cast<Label>(c)) + "' rows");
    }
  }
  const auto n = static_cast<double>(labels.size());
  ClassWeights w;
  for (int c = 0; c < kClassCount; ++c) w.per_class[c] = n / (kClassCount * static_cast<double>(counts[c]));
  return w;
}

Forest::Forest(ForestParams params, std::uint64_t seed, ClassWeights weights, std::vector<FeatureId> feature_ids,
               std::vector<DecisionTree> trees, double decision_threshold)
    : params_(params),
      seed_(seed),
      weights_(weights),
      feature_ids_(std::move(feature_ids)),
      trees_(std::move(trees)),
      decision_threshold_(decision_threshold) {
  if (trees_.empty()) throw InvalidInputError("forest needs at least one tree");
  if (!(decision_threshold_ >= 0.0 && decision_threshold_ <= 1.0)) {
    throw InvalidInputError("decision threshold must lie in [0,1]");
  }
  column_of_.fill(-1);
  for (std::size_t c = 0; c < feature_ids_.size(); ++c) {
    const FeatureId id = feature_ids_[c];
    if (!is_valid_feature_id(id) || column_of_[id] != -1) {
      throw InvalidInputError("forest feature ids must be unique ids in 1..63");
    }
    column_of_[id] = static_cast<int>(c);
  }
  for (const auto& tree : trees_) {
    for (const auto& node : tree.nodes()) {
      if (!node.is_leaf && column_of_[node.split.feature_id] < 0) {
        throw InvalidInputError("tree splits on " + feature_column(node.split.feature_id) +
                                ", which is not an active forest feature");
      }
    }
  }
}

Forest fit_forest(const Dataset& data, const ForestParams& params, std::uint64_t seed, int jobs) {
  if (params.trees < 1) throw InvalidInputError("forest needs at least one tree");
  if (data.rows() == 0) throw InvalidInputError("empty training set");
  if (!(params.tree.min_leaf_weight >= 0.0)) throw InvalidInputError("min leaf weight must be >= 0");
  const ClassWeights weights = params.class_weighting ? class_weights(data.labels()) : ClassWeights{};

  const std::size_t n = data.rows();
  std::vector<DecisionTree> trees(static_cast<std::size_t>(params.trees));
  parallel_for(trees.size(), jobs, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<double> sample_weight(n, 0.0);
    for (std::size_t draw = 0; draw < n; ++draw) sample_weight[rng.below(n)] += 1.0;
    for (std::size_t r = 0; r < n; ++r) sample_weight[r] *= weights.of(data.label(r));
    trees[t] = grow_tree(data, sample_weight, params.tree, rng);
  });
  return Forest(params, seed, weights, data.feature_ids(), std::move(trees));
}

double predict_score(const Forest& forest, std::span<const double> row) {
  if (row.size() != forest.feature_ids().size()) {
    throw InvalidInputError("row has " + std::to_string(row.size()) + " values, forest expects " +
                            std::to_string(forest.feature_ids().size()));
  }
  double sum = 0.0;
  for (const auto& tree : forest.trees()) sum += severe_fraction(tree.leaf_for(row, forest.column_of_feature()).histogram);
  return sum / static_cast<double>(forest.trees().size());
}

double predict_score(const Forest& forest, const FeatureVector& features) {
  std::vector<double> row;
  row.reserve(forest.feature_ids().size());
  for (FeatureId id : forest.feature_ids()) {
    const double v = features[id];
    if (!std::isfinite(v)) throw InvalidInputError("feature " + feature_column(id) + " is missing");
    row.push_back(v);
  }
  return predict_score(forest, row);
}

std::vector<double> predict_scores(const Forest& forest, const Dataset& data) {
  std::vector<double> scores;
  scores.reserve(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) scores.push_back(predict_score(forest, data.gather(r, forest.feature_ids())));
  return scores;
}

Label label_for_score(double score, double threshold) { return score >= threshold ? Label::Severe : Label::NonSevere; }

Label predict(const Forest& forest, const FeatureVector& features) {
  return label_for_score(predict_score(forest, features), forest.decision_threshold());
}

Label predict(const Forest& forest, const FeatureVector& features, double threshold) {
  return label_for_score(predict_score(forest, features), threshold);
}

}  // namespace ctsev
