#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "ctsev/forest.hpp"

namespace ctsev {

// One JSON document: params, seed, class weights, active feature ids,
// decision threshold and a flattened node array per tree. Doubles are
// written in shortest round-trip form, so load(save(f)) == f bit for bit.
nlohmann::ordered_json forest_to_json(const Forest& forest);
Forest forest_from_json(const nlohmann::json& j);

nlohmann::ordered_json forest_params_to_json(const ForestParams& params);
ForestParams forest_params_from_json(const nlohmann::json& j, ForestParams base = {});

void save_forest(const std::filesystem::path& path, const Forest& forest);
Forest load_forest(const std::filesystem::path& path);

}  // namespace ctsev
