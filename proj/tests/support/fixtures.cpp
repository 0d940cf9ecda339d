#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace ctsev::testing {

PhantomSpec random_phantom_spec(Rng& rng) {
  PhantomSpec spec;
  spec.dims = {static_cast<std::int64_t>(12 + rng.below(21)), static_cast<std::int64_t>(12 + rng.below(21)),
               static_cast<std::int64_t>(12 + rng.below(21))};
  spec.spacing = {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 3.0)};
  spec.lung_extent = rng.uniform(0.75, 0.95);
  double total = 0.0;
  for (auto& f : spec.segment_fractions) total += (f = rng.uniform(0.2, 1.0));
  for (auto& f : spec.segment_fractions) f /= total;
  for (auto& f : spec.infection_fractions) f = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
  spec.ggo_share = rng.uniform();
  spec.vessel_fraction = rng.uniform(0.0, 0.1);
  spec.seed = rng.next();
  return spec;
}

Dataset random_dataset(Rng& rng, std::size_t rows, int features, int levels) {
  std::vector<FeatureId> ids;
  for (int i = 1; i <= features; ++i) ids.push_back(i);
  std::vector<double> values;
  std::vector<Label> labels;
  for (std::size_t r = 0; r < rows; ++r) {
    for (int f = 0; f < features; ++f) {
      values.push_back(levels > 0 ? static_cast<double>(rng.below(static_cast<std::uint64_t>(levels)))
                                  : rng.normal());
    }
    labels.push_back(rng.uniform() < 0.4 ? Label::Severe : Label::NonSevere);
  }
  return Dataset(ids, values, labels);
}

Dataset separable_dataset(std::size_t n_non_severe, std::size_t n_severe, int features, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FeatureId> ids;
  for (int i = 1; i <= features; ++i) ids.push_back(i);
  std::vector<double> values;
  std::vector<Label> labels;
  for (std::size_t r = 0; r < n_non_severe + n_severe; ++r) {
    const bool severe = r >= n_non_severe;
    for (int f = 0; f < features; ++f) values.push_back((severe ? 10.0 : 0.0) + rng.uniform());
    labels.push_back(severe ? Label::Severe : Label::NonSevere);
  }
  return Dataset(ids, values, labels);
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("ctsev_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ctsev::testing
