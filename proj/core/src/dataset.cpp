#include "ctsev/dataset.hpp"

#include <numeric>

namespace ctsev {

const char* label_name(Label label) { return label == Label::Severe ? "severe" : "non-severe"; }

std::optional<Label> parse_label(std::string_view text) {
  if (text == "severe") return Label::Severe;
  if (text == "non-severe") return Label::NonSevere;
  return std::nullopt;
}

Dataset::Dataset(std::vector<FeatureId> feature_ids, std::vector<double> values, std::vector<Label> labels,
                 std::vector<std::string> row_names)
    : feature_ids_(std::move(feature_ids)),
      values_(std::move(values)),
      labels_(std::move(labels)),
      row_names_(std::move(row_names)) {
  column_of_.fill(-1);
  for (std::size_t c = 0; c < feature_ids_.size(); ++c) {
    const FeatureId id = feature_ids_[c];
    if (!is_valid_feature_id(id)) throw InvalidInputError("dataset feature id " + std::to_string(id) + " outside 1..63");
    if (column_of_[id] != -1) throw InvalidInputError("dataset feature id " + std::to_string(id) + " repeated");
    column_of_[id] = static_cast<int>(c);
  }
  if (values_.size() != labels_.size() * feature_ids_.size()) {
    throw InvalidInputError("dataset values do not match rows x columns");
  }
  if (row_names_.empty()) {
    row_names_.reserve(labels_.size());
    for (std::size_t r = 0; r < labels_.size(); ++r) row_names_.push_back("row" + std::to_string(r + 1));
  } else if (row_names_.size() != labels_.size()) {
    throw InvalidInputError("dataset row names do not match row count");
  }
}

std::optional<std::size_t> Dataset::column_of(FeatureId id) const {
  if (!is_valid_feature_id(id) || column_of_[id] < 0) return std::nullopt;
  return static_cast<std::size_t>(column_of_[id]);
}

std::array<std::size_t, kClassCount> Dataset::class_counts() const {
  std::array<std::size_t, kClassCount> counts{};
  for (Label l : labels_) ++counts[class_index(l)];
  return counts;
}

Dataset Dataset::subset_rows(std::span<const std::size_t> rows) const {
  std::vector<double> values;
  values.reserve(rows.size() * columns());
  std::vector<Label> labels;
  std::vector<std::string> names;
  for (std::size_t r : rows) {
    if (r >= this->rows()) throw InvalidInputError("row index out of range");
    const auto src = row(r);
    values.insert(values.end(), src.begin(), src.end());
    labels.push_back(labels_[r]);
    names.push_back(row_names_[r]);
  }
  return Dataset(feature_ids_, std::move(values), std::move(labels), std::move(names));
}

Dataset Dataset::select_features(std::span<const FeatureId> ids) const {
  std::vector<std::size_t> cols;
  for (FeatureId id : ids) {
    const auto c = column_of(id);
    if (!c) throw SchemaError("feature " + feature_column(id) + " is not present in the dataset");
    cols.push_back(*c);
  }
  std::vector<double> values;
  values.reserve(rows() * cols.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c : cols) values.push_back(value(r, c));
  }
  return Dataset({ids.begin(), ids.end()}, std::move(values), labels_, row_names_);
}

Dataset Dataset::with_labels(std::vector<Label> labels) const {
  return Dataset(feature_ids_, values_, std::move(labels), row_names_);
}

std::vector<double> Dataset::gather(std::size_t r, std::span<const FeatureId> ids) const {
  std::vector<double> out;
  out.reserve(ids.size());
  for (FeatureId id : ids) {
    const auto c = column_of(id);
    if (!c) throw SchemaError("feature " + feature_column(id) + " is not present in the dataset");
    out.push_back(value(r, *c));
  }
  return out;
}

std::vector<FeatureId> all_feature_ids() {
  std::vector<FeatureId> ids(kFeatureCount);
  std::iota(ids.begin(), ids.end(), 1);
  return ids;
}

Dataset dataset_from_features(std::span<const FeatureVector> rows, std::span<const Label> labels,
                              std::vector<std::string> row_names) {
  if (rows.size() != labels.size()) throw InvalidInputError("feature rows and labels differ in length");
  std::vector<double> values;
  values.reserve(rows.size() * kFeatureCount);
  for (const auto& fv : rows) values.insert(values.end(), fv.values().begin(), fv.values().end());
  return Dataset(all_feature_ids(), std::move(values), {labels.begin(), labels.end()}, std::move(row_names));
}

}  // namespace ctsev
