#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctsev/features.hpp"

namespace ctsev {

enum class Label : std::uint8_t { NonSevere = 0, Severe = 1 };
inline constexpr int kClassCount = 2;

const char* label_name(Label label);  // "non-severe" / "severe"
std::optional<Label> parse_label(std::string_view text);
inline std::size_t class_index(Label label) { return static_cast<std::size_t>(label); }

// Rows of feature values restricted to an ordered set of active feature ids,
// each with a class label. Row-major storage.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<FeatureId> feature_ids, std::vector<double> values, std::vector<Label> labels,
          std::vector<std::string> row_names = {});

  std::size_t rows() const { return labels_.size(); }
  std::size_t columns() const { return feature_ids_.size(); }
  const std::vector<FeatureId>& feature_ids() const { return feature_ids_; }

  double value(std::size_t row, std::size_t column) const { return values_[row * columns() + column]; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * columns(), columns()}; }
  Label label(std::size_t r) const { return labels_[r]; }
  std::span<const Label> labels() const { return labels_; }
  const std::string& row_name(std::size_t r) const { return row_names_[r]; }

  // Column holding `id`, or nullopt when the id is not active.
  std::optional<std::size_t> column_of(FeatureId id) const;

  std::array<std::size_t, kClassCount> class_counts() const;

  Dataset subset_rows(std::span<const std::size_t> rows) const;
  // Keeps columns for `ids` in the given order; throws SchemaError if one is
  // not active.
  Dataset select_features(std::span<const FeatureId> ids) const;
  Dataset with_labels(std::vector<Label> labels) const;

  // Gathers the values a consumer with `ids` expects from row `r`.
  std::vector<double> gather(std::size_t r, std::span<const FeatureId> ids) const;

 private:
  std::vector<FeatureId> feature_ids_;
  std::vector<double> values_;
  std::vector<Label> labels_;
  std::vector<std::string> row_names_;
  std::array<int, kFeatureCount + 1> column_of_{};  // -1 when absent
};

std::vector<FeatureId> all_feature_ids();  // 1..63

Dataset dataset_from_features(std::span<const FeatureVector> rows, std::span<const Label> labels,
                              std::vector<std::string> row_names = {});

}  // namespace ctsev
