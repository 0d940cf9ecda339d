#include "ctsev/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctsev {

double gini(std::span<const double> class_weights) {
  double total = 0.0;
  for (double w : class_weights) total += w;
  if (!(total > 0.0)) throw DegenerateError("gini of a node with zero total weight");
  double sum_sq = 0.0;
  for (double w : class_weights) {
    const double p = w / total;
    sum_sq += p * p;
  }
  return std::max(0.0, 1.0 - sum_sq);
}

namespace {

double total_weight(const ClassHistogram& h) { return h[0] + h[1]; }

double cost_of(const ClassHistogram& left, double left_w, const ClassHistogram& right, double right_w) {
  const double total = left_w + right_w;
  double cost = 0.0;
  if (left_w > 0.0) cost += (left_w / total) * gini(left);
  if (right_w > 0.0) cost += (right_w / total) * gini(right);
  return cost;
}

double midpoint_threshold(double a, double b) {
  const double t = a + (b - a) / 2.0;
  return t > a ? t : b;
}

}  // namespace

double split_cost(const ClassHistogram& left, const ClassHistogram& right) {
  const double lw = total_weight(left);
  const double rw = total_weight(right);
  if (!(lw + rw > 0.0)) throw DegenerateError("split with two empty sides");
  return cost_of(left, lw, right, rw);
}

std::optional<SplitCandidate> best_split(const NodeSample& node, std::span<const FeatureId> candidates,
                                         double min_child_weight) {
  const std::size_t n = node.rows.size();
  if (n < 2) return std::nullopt;

  ClassHistogram parent{};
  for (std::size_t r : node.rows) parent[class_index(node.data.label(r))] += node.weights[r];
  if (parent[0] <= 0.0 || parent[1] <= 0.0) return std::nullopt;
  const double parent_impurity = gini(parent);

  std::vector<FeatureId> ordered(candidates.begin(), candidates.end());
  std::sort(ordered.begin(), ordered.end());

  std::optional<SplitCandidate> best;
  std::vector<std::pair<double, std::size_t>> sorted(n);
  std::vector<ClassHistogram> suffix(n + 1);

  for (FeatureId id : ordered) {
    const auto column = node.data.column_of(id);
    if (!column) throw InvalidInputError("candidate feature " + feature_column(id) + " is not active");
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = node.rows[i];
      sorted[i] = {node.data.value(r, *column), r};
    }
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front().first == sorted.back().first) continue;

    suffix[n] = {0.0, 0.0};
    for (std::size_t i = n; i-- > 0;) {
      suffix[i] = suffix[i + 1];
      suffix[i][class_index(node.data.label(sorted[i].second))] += node.weights[sorted[i].second];
    }

    ClassHistogram left{};
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t r = sorted[i].second;
      left[class_index(node.data.label(r))] += node.weights[r];
      if (!(sorted[i].first < sorted[i + 1].first)) continue;
      const ClassHistogram& right = suffix[i + 1];
      const double lw = total_weight(left);
      const double rw = total_weight(right);
      if (lw <= 0.0 || rw <= 0.0 || lw < min_child_weight || rw < min_child_weight) continue;
      const double cost = cost_of(left, lw, right, rw);
      if (best && !(cost < best->cost - kCostTieTolerance)) continue;

      SplitCandidate c;
      c.feature_id = id;
      c.threshold = midpoint_threshold(sorted[i].first, sorted[i + 1].first);
      c.cost = cost;
      c.record.feature_id = id;
      c.record.threshold = c.threshold;
      c.record.left_weight = lw;
      c.record.right_weight = rw;
      c.record.parent_weight = lw + rw;
      c.record.parent_impurity = parent_impurity;
      c.record.left_impurity = gini(left);
      c.record.right_impurity = gini(right);
      best = c;
    }
  }
  if (best && best->cost < parent_impurity - kCostTieTolerance) return best;
  return std::nullopt;
}

int resolve_features_per_node(int requested, std::size_t active_features) {
  if (active_features == 0) throw InvalidInputError("dataset has no active features");
  const auto m = static_cast<int>(active_features);
  if (requested <= 0) {
    return std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(active_features)))));
  }
  return std::min(requested, m);
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw InvalidInputError("decision tree has no nodes");
  const auto count = static_cast<int>(nodes_.size());
  for (int i = 0; i < count; ++i) {
    const TreeNode& node = nodes_[static_cast<std::size_t>(i)];
    if (node.is_leaf) {
      if (!(total_weight(node.histogram) > 0.0)) {
        throw InvalidInputError("tree leaf " + std::to_string(i) + " has non-positive weight");
      }
      continue;
    }
    if (node.left <= i || node.right <= i || node.left >= count || node.right >= count || node.left == node.right) {
      throw InvalidInputError("tree node " + std::to_string(i) + " has invalid children");
    }
    if (!is_valid_feature_id(node.split.feature_id)) {
      throw InvalidInputError("tree node " + std::to_string(i) + " splits on an invalid feature id");
    }
  }
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> row, std::span<const int> column_of_feature) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf) {
    const TreeNode& node = nodes_[i];
    const double v = row[static_cast<std::size_t>(column_of_feature[node.split.feature_id])];
    i = static_cast<std::size_t>(v < node.split.threshold ? node.left : node.right);
  }
  return nodes_[i];
}

double severe_fraction(const ClassHistogram& h) {
  return h[class_index(Label::Severe)] / total_weight(h);
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, std::span<const double> weights, const TreeParams& params, Rng& rng)
      : data_(data), weights_(weights), params_(params), rng_(rng),
        mtry_(resolve_features_per_node(params.features_per_node, data.columns())),
        pool_(data.feature_ids()) {}

  std::vector<TreeNode> build(std::vector<std::size_t> rows) {
    grow(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<std::size_t> rows, int depth) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    ClassHistogram h{};
    for (std::size_t r : rows) h[class_index(data_.label(r))] += weights_[r];
    nodes_.back().histogram = h;

    const bool pure = h[0] <= 0.0 || h[1] <= 0.0;
    const bool depth_capped = params_.max_depth > 0 && depth >= params_.max_depth;
    if (pure || depth_capped || rows.size() < 2 || total_weight(h) < 2.0 * params_.min_leaf_weight) return index;

    const auto candidates = draw_candidates();
    const auto split = best_split({data_, weights_, rows}, candidates, params_.min_leaf_weight);
    if (!split) return index;

    const std::size_t column = *data_.column_of(split->feature_id);
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) (data_.value(r, column) < split->threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    TreeNode& node = nodes_[static_cast<std::size_t>(index)];
    node.is_leaf = false;
    node.split = split->record;
    node.left = l;
    node.right = r;
    return index;
  }

  std::vector<FeatureId> draw_candidates() {
    const auto m = static_cast<std::size_t>(mtry_);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + rng_.below(pool_.size() - i);
      std::swap(pool_[i], pool_[j]);
    }
    std::vector<FeatureId> picked(pool_.begin(), pool_.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(picked.begin(), picked.end());
    // The pool order feeds the next draw; reset it so each draw depends only
    // on the rng state.
    pool_ = data_.feature_ids();
    return picked;
  }

  const Dataset& data_;
  std::span<const double> weights_;
  TreeParams params_;
  Rng& rng_;
  int mtry_;
  std::vector<FeatureId> pool_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree grow_tree(const Dataset& data, std::span<const double> weights, const TreeParams& params, Rng& rng) {
  if (weights.size() != data.rows()) throw InvalidInputError("weight vector length differs from dataset rows");
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    if (weights[r] > 0.0) rows.push_back(r);
  }
  if (rows.empty()) throw InvalidInputError("grow_tree needs at least one positively weighted row");
  TreeBuilder builder(data, weights, params, rng);
  return DecisionTree(builder.build(std::move(rows)));
}

}  // namespace ctsev
