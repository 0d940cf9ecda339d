#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ctsev/protocol.hpp"
#include "ctsev/volume.hpp"

namespace ctsev::cli {

// Everything a command needs to reproduce its output. Emitted artifacts
// embed it under "run_config"; passing such an artifact back via --config
// reproduces the run.
struct RunConfig {
  std::uint64_t seed = 20200301;  // master seed
  std::optional<std::uint64_t> protocol_seed;  // defaults to the master seed
  ProtocolConfig protocol;
  LobeMap lobe_map;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();

  std::uint64_t resolved_protocol_seed() const { return protocol_seed.value_or(seed); }
  ProtocolConfig resolved_protocol() const;
};

// Accepts a plain config object, or any emitted artifact carrying
// "run_config". Missing keys keep `base` values.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

nlohmann::ordered_json run_config_to_json(const RunConfig& config);

// Which values follow the published protocol and which are conventions.
nlohmann::ordered_json provenance_json();

const char* tool_version();
nlohmann::ordered_json tool_json();

}  // namespace ctsev::cli
