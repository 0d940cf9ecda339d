#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ctsev/dataset.hpp"
#include "ctsev/phantom.hpp"
#include "ctsev/random.hpp"

namespace ctsev::testing {

// Random phantom spec with at most 32^3 voxels, uneven segment shares,
// random infection and spacing.
PhantomSpec random_phantom_spec(Rng& rng);

// Rows with `features` active ids (1..features), values drawn from a small
// integer alphabet when `levels` > 0 so ties are common.
Dataset random_dataset(Rng& rng, std::size_t rows, int features, int levels);

// Two well separated classes on every feature.
Dataset separable_dataset(std::size_t n_non_severe, std::size_t n_severe, int features, std::uint64_t seed);

// Unique empty directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace ctsev::testing
