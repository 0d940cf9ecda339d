#include "ctsev/qlv.hpp"

#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace ctsev {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct Header {
  Dims dims;
  Spacing spacing;
  std::string dtype;
  fs::path payload;
};

template <typename T>
const char* dtype_name();
template <>
const char* dtype_name<std::int16_t>() { return "i16"; }
template <>
const char* dtype_name<std::uint8_t>() { return "u8"; }

[[noreturn]] void fail(const fs::path& header, const std::string& field, const std::string& what) {
  throw ParseError(header.string() + ": field '" + field + "': " + what);
}

template <typename T>
void write_grid(const fs::path& header_path, const VoxelGrid<T>& grid) {
  fs::path payload = header_path.filename();
  payload.replace_extension(".raw");

  ordered_json header;
  header["dims"] = {grid.dims().nx, grid.dims().ny, grid.dims().nz};
  header["spacing_mm"] = {grid.spacing().x, grid.spacing().y, grid.spacing().z};
  header["dtype"] = dtype_name<T>();
  header["order"] = "x-fastest";
  header["payload"] = payload.generic_string();

  std::string bytes;
  bytes.reserve(grid.size() * sizeof(T));
  for (T v : grid.data()) {
    const auto u = static_cast<std::make_unsigned_t<T>>(v);
    for (std::size_t b = 0; b < sizeof(T); ++b) bytes.push_back(static_cast<char>((u >> (8 * b)) & 0xff));
  }

  const fs::path payload_path = header_path.parent_path() / payload;
  std::ofstream raw(payload_path, std::ios::binary | std::ios::trunc);
  if (!raw) throw Error("cannot open " + payload_path.string() + " for writing");
  raw.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!raw) throw Error("failed writing " + payload_path.string());

  std::ofstream out(header_path, std::ios::trunc);
  if (!out) throw Error("cannot open " + header_path.string() + " for writing");
  out << header.dump(2) << '\n';
  if (!out) throw Error("failed writing " + header_path.string());
}

Header read_header(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open QLV header " + path.string());
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": malformed JSON header: " + e.what());
  }
  if (!j.is_object()) throw ParseError(path.string() + ": header must be a JSON object");

  Header h;
  if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].size() != 3) {
    fail(path, "dims", "expected 3 positive integers");
  }
  std::int64_t d[3];
  for (int i = 0; i < 3; ++i) {
    const auto& v = j["dims"][i];
    if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) fail(path, "dims", "expected 3 positive integers");
    d[i] = v.get<std::int64_t>();
  }
  h.dims = {d[0], d[1], d[2]};

  if (!j.contains("spacing_mm") || !j["spacing_mm"].is_array() || j["spacing_mm"].size() != 3) {
    fail(path, "spacing_mm", "expected 3 positive reals");
  }
  double s[3];
  for (int i = 0; i < 3; ++i) {
    const auto& v = j["spacing_mm"][i];
    if (!v.is_number() || !(v.get<double>() > 0.0)) fail(path, "spacing_mm", "expected 3 positive reals");
    s[i] = v.get<double>();
  }
  h.spacing = {s[0], s[1], s[2]};

  if (!j.contains("dtype") || !j["dtype"].is_string()) fail(path, "dtype", "missing");
  h.dtype = j["dtype"].get<std::string>();

  if (!j.contains("order") || j["order"] != "x-fastest") fail(path, "order", "must be \"x-fastest\"");

  if (!j.contains("payload") || !j["payload"].is_string() || j["payload"].get<std::string>().empty()) {
    fail(path, "payload", "missing payload path");
  }
  h.payload = path.parent_path() / fs::path(j["payload"].get<std::string>());
  return h;
}

template <typename T>
std::vector<T> read_payload(const fs::path& header_path, const Header& h) {
  if (h.dtype != dtype_name<T>()) {
    fail(header_path, "dtype", "expected \"" + std::string(dtype_name<T>()) + "\", got \"" + h.dtype + "\"");
  }
  std::ifstream raw(h.payload, std::ios::binary);
  if (!raw) fail(header_path, "payload", "cannot open " + h.payload.string());
  const std::string bytes((std::istreambuf_iterator<char>(raw)), std::istreambuf_iterator<char>());

  const auto expected = static_cast<std::uintmax_t>(h.dims.voxel_count()) * sizeof(T);
  if (bytes.size() != expected) {
    fail(header_path, "payload", "length mismatch: " + std::to_string(bytes.size()) + " bytes, dims require " +
                                     std::to_string(expected));
  }
  std::vector<T> values(static_cast<std::size_t>(h.dims.voxel_count()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::make_unsigned_t<T> u = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
      u |= static_cast<std::make_unsigned_t<T>>(static_cast<unsigned char>(bytes[i * sizeof(T) + b]) << (8 * b));
    }
    values[i] = static_cast<T>(u);
  }
  return values;
}

}  // namespace

void save_volume(const fs::path& header, const CtVolume& volume) { write_grid(header, volume); }
void save_label_map(const fs::path& header, const RegionLabelMap& labels) { write_grid(header, labels); }
void save_infection(const fs::path& header, const InfectionMask& infection) { write_grid(header, infection); }

CtVolume load_volume(const fs::path& header) {
  const Header h = read_header(header);
  return CtVolume(h.dims, h.spacing, read_payload<std::int16_t>(header, h));
}

RegionLabelMap load_label_map(const fs::path& header) {
  const Header h = read_header(header);
  auto values = read_payload<std::uint8_t>(header, h);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > kMaxLabelCode) {
      fail(header, "payload", "label " + std::to_string(values[i]) + " at voxel " + std::to_string(i) +
                                  " out of range 0..18");
    }
  }
  return RegionLabelMap(h.dims, h.spacing, std::move(values));
}

InfectionMask load_infection(const fs::path& header) {
  const Header h = read_header(header);
  auto values = read_payload<std::uint8_t>(header, h);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 1) {
      fail(header, "payload", "infection flag " + std::to_string(values[i]) + " at voxel " +
                                  std::to_string(i) + " out of range 0..1");
    }
  }
  return InfectionMask(h.dims, h.spacing, std::move(values));
}

}  // namespace ctsev
