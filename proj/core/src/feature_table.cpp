#include "ctsev/feature_table.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace ctsev {

void FeatureTable::add_row(std::string patient_id, std::optional<Label> label, const FeatureVector& features) {
  patient_ids.push_back(std::move(patient_id));
  labels.push_back(label);
  for (FeatureId id : columns) values.push_back(features[id]);
  if (!extra_columns.empty()) extra_values.emplace_back(extra_columns.size());
}

bool FeatureTable::all_labeled() const {
  for (const auto& l : labels) {
    if (!l) return false;
  }
  return true;
}

namespace {

Dataset build_dataset(const FeatureTable& t, std::span<const FeatureId> ids, bool require_labels) {
  std::vector<FeatureId> wanted = ids.empty() ? t.columns : std::vector<FeatureId>(ids.begin(), ids.end());
  std::vector<std::size_t> cols;
  for (FeatureId id : wanted) {
    std::size_t c = 0;
    while (c < t.columns.size() && t.columns[c] != id) ++c;
    if (c == t.columns.size()) throw SchemaError("feature table lacks column " + feature_column(id));
    cols.push_back(c);
  }
  std::vector<double> values;
  values.reserve(t.rows() * cols.size());
  std::vector<Label> labels;
  labels.reserve(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (!t.labels[r] && require_labels) {
      throw InvalidInputError("row '" + t.patient_ids[r] + "' is unlabeled");
    }
    labels.push_back(t.labels[r].value_or(Label::NonSevere));
    for (std::size_t c : cols) values.push_back(t.value(r, c));
  }
  return Dataset(std::move(wanted), std::move(values), std::move(labels), t.patient_ids);
}

std::optional<FeatureId> parse_feature_column(const std::string& name) {
  if (name.size() != 3 || name[0] != 'f') return std::nullopt;
  int id = 0;
  const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + 3, id);
  if (ec != std::errc() || ptr != name.data() + 3 || !is_valid_feature_id(id)) return std::nullopt;
  return id;
}

}  // namespace

Dataset FeatureTable::to_dataset(std::span<const FeatureId> ids) const { return build_dataset(*this, ids, true); }

Dataset FeatureTable::to_unlabeled_dataset(std::span<const FeatureId> ids) const {
  return build_dataset(*this, ids, false);
}

FeatureTable feature_table_with_all_features() {
  FeatureTable t;
  t.columns = all_feature_ids();
  return t;
}

std::string format_real(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_feature_table(std::ostream& out, const FeatureTable& t) {
  out << "patient_id,label";
  for (FeatureId id : t.columns) out << ',' << feature_column(id);
  for (const auto& e : t.extra_columns) out << ',' << csv_escape(e);
  out << '\n';
  for (std::size_t r = 0; r < t.rows(); ++r) {
    out << csv_escape(t.patient_ids[r]) << ',' << (t.labels[r] ? label_name(*t.labels[r]) : "");
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << ',' << format_real(t.value(r, c));
    if (!t.extra_columns.empty()) {
      for (const auto& e : t.extra_values[r]) out << ',' << csv_escape(e);
    }
    out << '\n';
  }
}

void write_feature_table(const std::filesystem::path& path, const FeatureTable& table) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_feature_table(out, table);
  if (!out) throw Error("failed writing " + path.string());
}

FeatureTable read_feature_table(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source + ": empty feature table");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "patient_id" || header[1] != "label") {
    throw ParseError(source + ": header must start with 'patient_id,label'");
  }
  FeatureTable t;
  std::size_t i = 2;
  for (; i < header.size(); ++i) {
    const auto id = parse_feature_column(header[i]);
    if (!id) break;
    for (FeatureId seen : t.columns) {
      if (seen == *id) throw ParseError(source + ": duplicate column " + header[i]);
    }
    t.columns.push_back(*id);
  }
  for (; i < header.size(); ++i) {
    if (parse_feature_column(header[i])) {
      throw ParseError(source + ": feature column " + header[i] + " after non-feature columns");
    }
    t.extra_columns.push_back(header[i]);
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    const std::string where = source + ":" + std::to_string(line_no);
    if (cells.size() != header.size()) {
      throw ParseError(where + ": expected " + std::to_string(header.size()) + " cells, got " +
                       std::to_string(cells.size()));
    }
    t.patient_ids.push_back(cells[0]);
    if (cells[1].empty()) {
      t.labels.emplace_back(std::nullopt);
    } else {
      const auto label = parse_label(cells[1]);
      if (!label) throw ParseError(where + ": field 'label': unknown class '" + cells[1] + "'");
      t.labels.emplace_back(*label);
    }
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const std::string& cell = cells[2 + c];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ParseError(where + ": field '" + header[2 + c] + "': not a finite number: '" + cell + "'");
      }
      t.values.push_back(v);
    }
    if (!t.extra_columns.empty()) {
      t.extra_values.emplace_back(cells.begin() + static_cast<std::ptrdiff_t>(2 + t.columns.size()), cells.end());
    }
  }
  return t;
}

FeatureTable read_feature_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open feature table " + path.string());
  return read_feature_table(in, path.string());
}

}  // namespace ctsev
