#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "ctsev/dataset.hpp"
#include "ctsev/random.hpp"

namespace ctsev {

// Per-class summed sample weight, indexed by class_index(Label).
using ClassHistogram = std::array<double, kClassCount>;

// 1 - sum_c P_c^2 over the class weights. Throws DegenerateError when the
// total weight is not positive.
double gini(std::span<const double> class_weights);
inline double gini(const ClassHistogram& h) { return gini(std::span<const double>(h)); }

// Child Gini values averaged by child weight fraction.
double split_cost(const ClassHistogram& left, const ClassHistogram& right);

// Costs closer than this are ties and fall back to (feature id, threshold)
// order. Costs live in [0, 0.5].
inline constexpr double kCostTieTolerance = 1e-12;

struct SplitRecord {
  FeatureId feature_id = 0;
  double threshold = 0.0;
  double parent_weight = 0.0;
  double left_weight = 0.0;
  double right_weight = 0.0;
  double parent_impurity = 0.0;
  double left_impurity = 0.0;
  double right_impurity = 0.0;

  bool operator==(const SplitRecord&) const = default;
};

struct SplitCandidate {
  FeatureId feature_id = 0;
  double threshold = 0.0;
  double cost = 0.0;
  SplitRecord record;
};

// Weighted node sample: dataset rows with a per-row weight (indexed by
// dataset row).
struct NodeSample {
  const Dataset& data;
  std::span<const double> weights;
  std::span<const std::size_t> rows;
};

// Best (feature, midpoint) split over `candidates` by split_cost. Rows with
// value < threshold go left. Ties go to the lower feature id, then the lower
// threshold. Splits leaving a child lighter than `min_child_weight` are
// skipped. Returns nullopt for fewer than two rows, a pure node, or when no
// split lowers the cost below the parent impurity.
std::optional<SplitCandidate> best_split(const NodeSample& node, std::span<const FeatureId> candidates,
                                         double min_child_weight = 0.0);

struct TreeParams {
  int features_per_node = 0;  // 0 = floor(sqrt(active features))
  double min_leaf_weight = 1.0;
  int max_depth = 0;  // 0 = unlimited

  bool operator==(const TreeParams&) const = default;
};

int resolve_features_per_node(int requested, std::size_t active_features);

struct TreeNode {
  bool is_leaf = true;
  ClassHistogram histogram{};  // weighted class totals reaching the node
  SplitRecord split;           // internal nodes only
  int left = -1;
  int right = -1;

  bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes);  // checks structure

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  // `column_of_feature[id]` maps a feature id to its slot in `row`.
  const TreeNode& leaf_for(std::span<const double> row, std::span<const int> column_of_feature) const;

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

// Severe share of a leaf's weighted histogram.
double severe_fraction(const ClassHistogram& h);

// CART growth from the rows with positive weight. Each node draws
// `features_per_node` candidate features from `rng`.
DecisionTree grow_tree(const Dataset& data, std::span<const double> weights, const TreeParams& params, Rng& rng);

}  // namespace ctsev
