#pragma once

#include <filesystem>

#include "ctsev/volume.hpp"

namespace ctsev {

// QLV: a UTF-8 JSON header (dims, spacing_mm, dtype, order, payload) next to
// a raw little-endian payload with no padding. The payload path in the
// header is relative to the header's directory. Saving `dir/name.json`
// writes the payload to `dir/name.raw`.

void save_volume(const std::filesystem::path& header, const CtVolume& volume);
void save_label_map(const std::filesystem::path& header, const RegionLabelMap& labels);
void save_infection(const std::filesystem::path& header, const InfectionMask& infection);

CtVolume load_volume(const std::filesystem::path& header);
RegionLabelMap load_label_map(const std::filesystem::path& header);
InfectionMask load_infection(const std::filesystem::path& header);

}  // namespace ctsev
