#include "ctsev_cli/run_config.hpp"

#include <fstream>

#include "ctsev/forest_io.hpp"

#ifndef CTSEV_VERSION
#define CTSEV_VERSION "0.0.0"
#endif

namespace ctsev::cli {

using ordered_json = nlohmann::ordered_json;

ProtocolConfig RunConfig::resolved_protocol() const {
  ProtocolConfig p = protocol;
  p.seed = resolved_protocol_seed();
  return p;
}

RunConfig run_config_from_json(const nlohmann::json& raw, RunConfig c) {
  const nlohmann::json& j = raw.contains("run_config") ? raw.at("run_config") : raw;
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("protocol_seed")) {
      if (j.at("protocol_seed").is_null()) c.protocol_seed.reset();
      else c.protocol_seed = j.at("protocol_seed").get<std::uint64_t>();
    }
    nlohmann::json protocol_keys = j;
    protocol_keys.erase("seed");  // protocol seed is resolved separately
    c.protocol = protocol_config_from_json(protocol_keys, c.protocol);
    if (j.contains("lobe_map")) c.lobe_map = LobeMap::from_json(j.at("lobe_map"));
    if (j.contains("inputs") && j.at("inputs").is_object()) c.inputs = j.at("inputs");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  } catch (const SpecError& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": malformed JSON: " + e.what());
  }
  return run_config_from_json(j, std::move(base));
}

ordered_json run_config_to_json(const RunConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["protocol_seed"] = c.resolved_protocol_seed();
  const ordered_json p = protocol_config_to_json(c.protocol);
  for (const auto& [key, value] : p.items()) {
    if (key != "seed") j[key] = value;
  }
  j["lobe_map"] = c.lobe_map.to_json();
  j["inputs"] = c.inputs;
  return j;
}

ordered_json provenance_json() {
  ordered_json j;
  j["published_protocol"] = {"forest.trees=500", "k_grid=[63,50,40,30,20,10]", "folds=3", "train_fraction=0.7",
                             "class_weighting=inverse class frequency", "hu_bands=(-inf,-750),[-750,-300),[-300,50),[50,+inf)"};
  j["conventions"] = {"forest.features_per_node=0 means floor(sqrt(active features))",
                      "forest.min_leaf_weight=1.0, forest.max_depth=0 (unlimited)",
                      "class weight = N / (2 * N_c)",
                      "score = mean leaf severe fraction; severe iff score >= decision_threshold",
                      "positive class = severe",
                      "importance_mode=weighted (child impurities weighted by child size)",
                      "K chosen by validation accuracy, then AUC, then smaller K",
                      "refit=true: chosen-K model refit on train+validation before testing",
                      "pooled_test merges test predictions of all folds; fold_average_test is also reported",
                      "lobe_map: RS1-3/RS4-5/RS6-10, LS1-4/LS5-8 unless overridden"};
  return j;
}

const char* tool_version() { return CTSEV_VERSION; }

ordered_json tool_json() { return {{"name", "ctsev"}, {"version", tool_version()}}; }

}  // namespace ctsev::cli
