#pragma once

#include <array>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "ctsev/forest.hpp"

namespace ctsev {

// weighted: G(x) - |xl|/|x| G(xl) - |xr|/|x| G(xr), the usual mean decrease
//           in impurity; never negative for accepted CART splits.
// literal:  G(x) - G(xl) - G(xr), child impurities unweighted. Can go
//           negative; kept for comparison.
enum class DecreaseMode { Weighted, Literal };

const char* decrease_mode_name(DecreaseMode mode);
DecreaseMode parse_decrease_mode(std::string_view text);

double node_decrease(const SplitRecord& split, DecreaseMode mode);

// Mean node_decrease over every node in the forest that splits on `id`
// (divided by the node count, not summed); 0 when unused.
double reduced_gini(const Forest& forest, FeatureId id, DecreaseMode mode);

struct ImportanceVector {
  DecreaseMode mode = DecreaseMode::Weighted;
  std::array<double, kFeatureCount> importance{};
  std::array<double, kFeatureCount> reduced_gini{};
  std::array<std::size_t, kFeatureCount> node_count{};

  double importance_of(FeatureId id) const { return importance[static_cast<std::size_t>(id - 1)]; }
  double reduced_gini_of(FeatureId id) const { return reduced_gini[static_cast<std::size_t>(id - 1)]; }
  std::size_t node_count_of(FeatureId id) const { return node_count[static_cast<std::size_t>(id - 1)]; }

  // All 63 ids by descending importance, ties to the lower id.
  std::vector<FeatureId> ranking() const;
};

// Reduced Gini normalized to sum to 1. Throws DegenerateError when the
// forest has no split (or the decreases sum to zero).
ImportanceVector importance_vector(const Forest& forest, DecreaseMode mode);

// First k ids of the ranking; InvalidInputError unless 1 <= k <= 63.
std::vector<FeatureId> top_k(const ImportanceVector& importances, int k);

// rank,feature_id,feature_name,importance,reduced_gini,node_count
void write_importance_csv(std::ostream& out, const ImportanceVector& importances);

}  // namespace ctsev
