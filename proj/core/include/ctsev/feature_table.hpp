#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ctsev/dataset.hpp"

namespace ctsev {

// CSV with header `patient_id,label,f01..f63`. The label cell is
// "non-severe", "severe" or empty for unlabeled rows. Readers accept any
// subset of fNN columns; extra non-feature columns after them are kept
// verbatim so scored tables can be re-read.
struct FeatureTable {
  std::vector<FeatureId> columns;
  std::vector<std::string> patient_ids;
  std::vector<std::optional<Label>> labels;
  std::vector<double> values;  // row-major, rows x columns.size()
  std::vector<std::string> extra_columns;
  std::vector<std::vector<std::string>> extra_values;

  std::size_t rows() const { return patient_ids.size(); }
  double value(std::size_t r, std::size_t c) const { return values[r * columns.size() + c]; }

  void add_row(std::string patient_id, std::optional<Label> label, const FeatureVector& features);
  bool all_labeled() const;

  // Labeled dataset over `ids` (all table columns when empty). Throws
  // SchemaError for missing columns, InvalidInputError for unlabeled rows.
  Dataset to_dataset(std::span<const FeatureId> ids = {}) const;
  // Same, but unlabeled rows get NonSevere as a placeholder label.
  Dataset to_unlabeled_dataset(std::span<const FeatureId> ids) const;
};

FeatureTable feature_table_with_all_features();

// 17 significant digits, so every double round-trips through the CSV.
std::string format_real(double v);

void write_feature_table(std::ostream& out, const FeatureTable& table);
void write_feature_table(const std::filesystem::path& path, const FeatureTable& table);
FeatureTable read_feature_table(std::istream& in, const std::string& source = "<stream>");
FeatureTable read_feature_table(const std::filesystem::path& path);

// Minimal CSV helpers shared by the report writers.
std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_escape(const std::string& cell);

}  // namespace ctsev
