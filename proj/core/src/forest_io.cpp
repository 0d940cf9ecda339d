#include "ctsev/forest_io.hpp"

#include <fstream>

namespace ctsev {

using ordered_json = nlohmann::ordered_json;

ordered_json forest_params_to_json(const ForestParams& p) {
  ordered_json j;
  j["trees"] = p.trees;
  j["features_per_node"] = p.tree.features_per_node;
  j["min_leaf_weight"] = p.tree.min_leaf_weight;
  j["max_depth"] = p.tree.max_depth;
  j["class_weighting"] = p.class_weighting;
  return j;
}

ForestParams forest_params_from_json(const nlohmann::json& j, ForestParams p) {
  if (!j.is_object()) throw ParseError("forest params must be a JSON object");
  try {
    if (j.contains("trees")) p.trees = j.at("trees").get<int>();
    if (j.contains("features_per_node")) p.tree.features_per_node = j.at("features_per_node").get<int>();
    if (j.contains("min_leaf_weight")) p.tree.min_leaf_weight = j.at("min_leaf_weight").get<double>();
    if (j.contains("max_depth")) p.tree.max_depth = j.at("max_depth").get<int>();
    if (j.contains("class_weighting")) p.class_weighting = j.at("class_weighting").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("forest params: ") + e.what());
  }
  if (p.trees < 1) throw ParseError("forest params: 'trees' must be >= 1");
  if (p.tree.features_per_node < 0) throw ParseError("forest params: 'features_per_node' must be >= 0");
  if (!(p.tree.min_leaf_weight >= 0.0)) throw ParseError("forest params: 'min_leaf_weight' must be >= 0");
  if (p.tree.max_depth < 0) throw ParseError("forest params: 'max_depth' must be >= 0");
  return p;
}

ordered_json forest_to_json(const Forest& forest) {
  ordered_json j;
  j["format"] = "ctsev-forest";
  j["version"] = 1;
  j["params"] = forest_params_to_json(forest.params());
  j["seed"] = forest.seed();
  j["class_weights"] = {{"non-severe", forest.class_weights().of(Label::NonSevere)},
                        {"severe", forest.class_weights().of(Label::Severe)}};
  j["feature_ids"] = forest.feature_ids();
  j["decision_threshold"] = forest.decision_threshold();
  ordered_json trees = ordered_json::array();
  for (const auto& tree : forest.trees()) {
    ordered_json nodes = ordered_json::array();
    for (const auto& node : tree.nodes()) {
      ordered_json n;
      if (node.is_leaf) {
        n["kind"] = "leaf";
        n["histogram"] = node.histogram;
      } else {
        const SplitRecord& s = node.split;
        n["kind"] = "split";
        n["feature_id"] = s.feature_id;
        n["threshold"] = s.threshold;
        n["left"] = node.left;
        n["right"] = node.right;
        n["histogram"] = node.histogram;
        n["weights"] = {s.parent_weight, s.left_weight, s.right_weight};
        n["impurities"] = {s.parent_impurity, s.left_impurity, s.right_impurity};
      }
      nodes.push_back(std::move(n));
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  j["trees"] = std::move(trees);
  return j;
}

Forest forest_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != "ctsev-forest") {
      throw ParseError("model JSON: field 'format' must be \"ctsev-forest\"");
    }
    const ForestParams params = forest_params_from_json(j.at("params"));
    ClassWeights weights;
    weights.per_class[class_index(Label::NonSevere)] = j.at("class_weights").at("non-severe").get<double>();
    weights.per_class[class_index(Label::Severe)] = j.at("class_weights").at("severe").get<double>();
    auto ids = j.at("feature_ids").get<std::vector<FeatureId>>();
    const double threshold = j.at("decision_threshold").get<double>();

    std::vector<DecisionTree> trees;
    for (const auto& t : j.at("trees")) {
      std::vector<TreeNode> nodes;
      for (const auto& n : t.at("nodes")) {
        TreeNode node;
        const auto kind = n.at("kind").get<std::string>();
        node.histogram = n.at("histogram").get<ClassHistogram>();
        if (kind == "leaf") {
          node.is_leaf = true;
        } else if (kind == "split") {
          node.is_leaf = false;
          node.split.feature_id = n.at("feature_id").get<FeatureId>();
          node.split.threshold = n.at("threshold").get<double>();
          node.left = n.at("left").get<int>();
          node.right = n.at("right").get<int>();
          const auto w = n.at("weights").get<std::array<double, 3>>();
          const auto g = n.at("impurities").get<std::array<double, 3>>();
          node.split.parent_weight = w[0];
          node.split.left_weight = w[1];
          node.split.right_weight = w[2];
          node.split.parent_impurity = g[0];
          node.split.left_impurity = g[1];
          node.split.right_impurity = g[2];
        } else {
          throw ParseError("model JSON: node field 'kind' must be \"leaf\" or \"split\"");
        }
        nodes.push_back(node);
      }
      trees.emplace_back(std::move(nodes));
    }
    return Forest(params, j.at("seed").get<std::uint64_t>(), weights, std::move(ids), std::move(trees), threshold);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  } catch (const InvalidInputError& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
}

void save_forest(const std::filesystem::path& path, const Forest& forest) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << forest_to_json(forest).dump() << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

Forest load_forest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": malformed JSON: " + e.what());
  }
  return forest_from_json(j);
}

}  // namespace ctsev
