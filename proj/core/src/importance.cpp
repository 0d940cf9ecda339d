#include "ctsev/importance.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "ctsev/feature_table.hpp"

namespace ctsev {

const char* decrease_mode_name(DecreaseMode mode) { return mode == DecreaseMode::Weighted ? "weighted" : "literal"; }

DecreaseMode parse_decrease_mode(std::string_view text) {
  if (text == "weighted") return DecreaseMode::Weighted;
  if (text == "literal") return DecreaseMode::Literal;
  throw InvalidInputError("importance mode must be 'weighted' or 'literal', got '" + std::string(text) + "'");
}

double node_decrease(const SplitRecord& s, DecreaseMode mode) {
  if (mode == DecreaseMode::Literal) return s.parent_impurity - s.left_impurity - s.right_impurity;
  return s.parent_impurity - (s.left_weight / s.parent_weight) * s.left_impurity -
         (s.right_weight / s.parent_weight) * s.right_impurity;
}

namespace {

struct Accumulated {
  std::array<double, kFeatureCount> sum{};
  std::array<std::size_t, kFeatureCount> count{};
};

// Tree order, then node order: the summation order is fixed.
Accumulated accumulate(const Forest& forest, DecreaseMode mode) {
  Accumulated acc;
  for (const auto& tree : forest.trees()) {
    for (const auto& node : tree.nodes()) {
      if (node.is_leaf) continue;
      const auto i = static_cast<std::size_t>(node.split.feature_id - 1);
      acc.sum[i] += node_decrease(node.split, mode);
      ++acc.count[i];
    }
  }
  return acc;
}

}  // namespace

double reduced_gini(const Forest& forest, FeatureId id, DecreaseMode mode) {
  if (!is_valid_feature_id(id)) throw InvalidInputError("feature id " + std::to_string(id) + " outside 1..63");
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& tree : forest.trees()) {
    for (const auto& node : tree.nodes()) {
      if (node.is_leaf || node.split.feature_id != id) continue;
      sum += node_decrease(node.split, mode);
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

ImportanceVector importance_vector(const Forest& forest, DecreaseMode mode) {
  const Accumulated acc = accumulate(forest, mode);
  ImportanceVector iv;
  iv.mode = mode;
  iv.node_count = acc.count;
  std::size_t splits = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    splits += acc.count[i];
    iv.reduced_gini[i] = acc.count[i] == 0 ? 0.0 : acc.sum[i] / static_cast<double>(acc.count[i]);
    total += iv.reduced_gini[i];
  }
  if (splits == 0) throw DegenerateError("forest has no split nodes; importance is undefined");
  if (total == 0.0) throw DegenerateError("reduced Gini values sum to zero; importance is undefined");
  for (std::size_t i = 0; i < kFeatureCount; ++i) iv.importance[i] = iv.reduced_gini[i] / total;
  return iv;
}

std::vector<FeatureId> ImportanceVector::ranking() const {
  std::vector<FeatureId> ids = all_feature_ids();
  std::stable_sort(ids.begin(), ids.end(), [this](FeatureId a, FeatureId b) {
    return importance_of(a) > importance_of(b);
  });
  return ids;
}

std::vector<FeatureId> top_k(const ImportanceVector& importances, int k) {
  if (k < 1 || k > kFeatureCount) throw InvalidInputError("top-k requires 1 <= k <= 63, got " + std::to_string(k));
  auto ids = importances.ranking();
  ids.resize(static_cast<std::size_t>(k));
  return ids;
}

void write_importance_csv(std::ostream& out, const ImportanceVector& iv) {
  out << "rank,feature_id,feature_name,importance,reduced_gini,node_count\n";
  int rank = 1;
  for (FeatureId id : iv.ranking()) {
    out << rank++ << ',' << id << ',' << csv_escape(feature_name(id)) << ',' << format_real(iv.importance_of(id)) << ','
        << format_real(iv.reduced_gini_of(id)) << ',' << iv.node_count_of(id) << '\n';
  }
}

}  // namespace ctsev
