#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "ctsev/error.hpp"
#include "ctsev/importance.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace ctsev {
namespace {

SplitRecord record(FeatureId id, ClassHistogram parent, ClassHistogram left, ClassHistogram right) {
  SplitRecord s;
  s.feature_id = id;
  s.threshold = 0.5;
  s.parent_weight = parent[0] + parent[1];
  s.left_weight = left[0] + left[1];
  s.right_weight = right[0] + right[1];
  s.parent_impurity = gini(parent);
  s.left_impurity = gini(left);
  s.right_impurity = gini(right);
  return s;
}

DecisionTree one_split(FeatureId id, ClassHistogram parent, ClassHistogram left, ClassHistogram right) {
  TreeNode root;
  root.is_leaf = false;
  root.histogram = parent;
  root.split = record(id, parent, left, right);
  root.left = 1;
  root.right = 2;
  TreeNode l, r;
  l.histogram = left;
  r.histogram = right;
  return DecisionTree({root, l, r});
}

Forest forest_of(std::vector<DecisionTree> trees, std::vector<FeatureId> ids) {
  return Forest({}, 0, {}, std::move(ids), std::move(trees));
}

Forest random_forest(std::uint64_t seed, int trees) {
  Rng rng(seed);
  const Dataset d = testing::random_dataset(rng, 60 + rng.below(80), 10 + static_cast<int>(rng.below(20)), 0);
  ForestParams p;
  p.trees = trees;
  return fit_forest(d, p, seed);
}

TEST(NodeDecrease, Examples) {
  const auto pure = record(1, {2, 2}, {2, 0}, {0, 2});
  EXPECT_DOUBLE_EQ(node_decrease(pure, DecreaseMode::Weighted), 0.5);
  const auto same = record(1, {2, 2}, {1, 1}, {1, 1});
  EXPECT_NEAR(node_decrease(same, DecreaseMode::Weighted), 0.0, 1e-15);
  const auto sixth = record(1, {2, 2}, {2, 1}, {0, 1});
  EXPECT_NEAR(node_decrease(sixth, DecreaseMode::Weighted), 1.0 / 6.0, 1e-15);
}

TEST(NodeDecrease, LiteralCanBeNegative) {
  SplitRecord s;
  s.parent_weight = 10;
  s.left_weight = 5;
  s.right_weight = 5;
  s.parent_impurity = 0.5;
  s.left_impurity = 0.4;
  s.right_impurity = 0.4;
  EXPECT_NEAR(node_decrease(s, DecreaseMode::Literal), -0.3, 1e-15);
  EXPECT_NEAR(node_decrease(s, DecreaseMode::Weighted), 0.1, 1e-15);
}

TEST(NodeDecrease, WeightedNonNegativeOnRandomHistograms) {
  Rng rng(2);
  for (int i = 0; i < 2000; ++i) {
    const ClassHistogram l{rng.uniform() * 5, rng.uniform() * 5};
    const ClassHistogram r{rng.uniform() * 5, rng.uniform() * 5};
    const ClassHistogram p{l[0] + r[0], l[1] + r[1]};
    EXPECT_GE(node_decrease(record(1, p, l, r), DecreaseMode::Weighted), -1e-15);
  }
}

TEST(DecreaseMode, Names) {
  EXPECT_EQ(parse_decrease_mode("weighted"), DecreaseMode::Weighted);
  EXPECT_EQ(parse_decrease_mode(decrease_mode_name(DecreaseMode::Literal)), DecreaseMode::Literal);
  EXPECT_THROW(parse_decrease_mode("sum"), Error);
}

TEST(ReducedGini, UnusedAndSingleSplit) {
  const Forest f = forest_of({one_split(4, {2, 2}, {2, 1}, {0, 1})}, {4, 9});
  EXPECT_EQ(reduced_gini(f, 9, DecreaseMode::Weighted), 0.0);
  EXPECT_NEAR(reduced_gini(f, 4, DecreaseMode::Weighted), 1.0 / 6.0, 1e-15);
}

TEST(ReducedGini, AveragesOverNodes) {
  const Forest f = forest_of({one_split(4, {2, 2}, {2, 0}, {0, 2}), one_split(4, {2, 2}, {2, 1}, {0, 1})}, {4});
  EXPECT_NEAR(reduced_gini(f, 4, DecreaseMode::Weighted), (0.5 + 1.0 / 6.0) / 2.0, 1e-15);
}

TEST(ReducedGini, MatchesNodeWalk) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Forest f = random_forest(seed, 10 + static_cast<int>(seed) * 5);
    for (DecreaseMode mode : {DecreaseMode::Weighted, DecreaseMode::Literal}) {
      for (FeatureId id = 1; id <= kFeatureCount; ++id) {
        EXPECT_NEAR(reduced_gini(f, id, mode), oracle::node_walk_reduced_gini(f, id, mode), 1e-12);
      }
    }
  }
}

TEST(ImportanceVector, NormalizedAndSupported) {
  const Forest f = random_forest(11, 30);
  const ImportanceVector iv = importance_vector(f, DecreaseMode::Weighted);
  double total = 0;
  for (FeatureId id = 1; id <= kFeatureCount; ++id) {
    total += iv.importance_of(id);
    EXPECT_GE(iv.importance_of(id), 0.0);
    EXPECT_EQ(iv.importance_of(id) == 0.0, iv.node_count_of(id) == 0) << id;
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(ImportanceVector, SingleFeatureForest) {
  const Forest f = forest_of({one_split(7, {2, 2}, {2, 0}, {0, 2}), one_split(7, {3, 1}, {3, 0}, {0, 1})}, {7, 8});
  const auto iv = importance_vector(f, DecreaseMode::Weighted);
  EXPECT_EQ(iv.importance_of(7), 1.0);
  for (FeatureId id = 1; id <= kFeatureCount; ++id) {
    if (id != 7) {
      EXPECT_EQ(iv.importance_of(id), 0.0);
    }
  }
  EXPECT_EQ(iv.node_count_of(7), 2u);
}

TEST(ImportanceVector, SymmetricFeaturesTie) {
  const Forest f = forest_of({one_split(12, {2, 2}, {2, 1}, {0, 1}), one_split(30, {2, 2}, {2, 1}, {0, 1})}, {12, 30});
  const auto iv = importance_vector(f, DecreaseMode::Weighted);
  EXPECT_EQ(iv.importance_of(12), iv.importance_of(30));
  EXPECT_EQ(iv.importance_of(12), 0.5);
  EXPECT_EQ(top_k(iv, 1), std::vector<FeatureId>{12});
}

TEST(ImportanceVector, AllLeafForestIsDegenerate) {
  TreeNode leaf;
  leaf.histogram = {1, 1};
  const Forest f = forest_of({DecisionTree({leaf})}, {1});
  EXPECT_THROW(importance_vector(f, DecreaseMode::Weighted), DegenerateError);
}

TEST(TopK, OrderingAndRange) {
  const Forest f = random_forest(21, 20);
  const auto iv = importance_vector(f, DecreaseMode::Weighted);
  const auto all = top_k(iv, 63);
  ASSERT_EQ(all.size(), 63u);
  for (std::size_t i = 1; i < all.size(); ++i) {
    const double a = iv.importance_of(all[i - 1]), b = iv.importance_of(all[i]);
    EXPECT_TRUE(a > b || (a == b && all[i - 1] < all[i]));
  }
  const auto best = top_k(iv, 1);
  for (FeatureId id = 1; id <= kFeatureCount; ++id) EXPECT_GE(iv.importance_of(best[0]), iv.importance_of(id));
  EXPECT_THROW(top_k(iv, 0), InvalidInputError);
  EXPECT_THROW(top_k(iv, 64), InvalidInputError);
}

TEST(ImportanceCsv, Format) {
  const Forest f = forest_of({one_split(7, {2, 2}, {2, 0}, {0, 2})}, {7});
  std::ostringstream out;
  write_importance_csv(out, importance_vector(f, DecreaseMode::Weighted));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "rank,feature_id,feature_name,importance,reduced_gini,node_count");
  std::getline(in, line);
  EXPECT_EQ(line, "1,7,IR(RL),1,0.5,1");
  std::size_t rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 63u);
}

}  // namespace
}  // namespace ctsev
