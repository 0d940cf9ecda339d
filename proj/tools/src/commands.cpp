#include "ctsev_cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "ctsev/cohort.hpp"
#include "ctsev/error.hpp"
#include "ctsev/feature_table.hpp"
#include "ctsev/features.hpp"
#include "ctsev/forest_io.hpp"
#include "ctsev/importance.hpp"
#include "ctsev/log.hpp"
#include "ctsev/phantom.hpp"
#include "ctsev/protocol.hpp"
#include "ctsev/qlv.hpp"
#include "ctsev/random.hpp"
#include "ctsev_cli/run_config.hpp"
#include "ctsev_cli/svg.hpp"

namespace ctsev::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// Raised for bad flag values found after CLI11 parsing; exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> protocol_seed;
  std::string config;
  int jobs = 1;
  std::string out;
  std::optional<int> trees;
  std::optional<int> features_per_node;
  std::optional<double> min_leaf_weight;
  std::optional<int> max_depth;
  std::string k_grid;
  std::optional<int> folds;
  std::optional<double> train_fraction;
  std::string importance_mode;
  std::string positive;
  std::optional<double> threshold;
  bool no_class_weighting = false;
  bool no_refit = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool out_required) {
  cmd->add_option("--seed", f.seed, "Master seed (also resets the protocol seed)");
  cmd->add_option("--config", f.config, "JSON config, or any artifact embedding run_config")->check(CLI::ExistingFile);
  cmd->add_option("--jobs", f.jobs, "Worker threads; 0 = hardware concurrency")->check(CLI::NonNegativeNumber);
  auto* out = cmd->add_option("--out", f.out, "Output path");
  if (out_required) out->required();
}

void add_model_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--protocol-seed", f.protocol_seed, "Seed of the evaluation protocol");
  cmd->add_option("--trees", f.trees, "Trees per forest")->check(CLI::PositiveNumber);
  cmd->add_option("--features-per-node", f.features_per_node, "Candidates per split; 0 = floor(sqrt(m))")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--min-leaf-weight", f.min_leaf_weight, "Minimum weight per child")->check(CLI::PositiveNumber);
  cmd->add_option("--max-depth", f.max_depth, "0 = unlimited")->check(CLI::NonNegativeNumber);
  cmd->add_option("--k-grid", f.k_grid, "Comma-separated K values");
  cmd->add_option("--folds", f.folds, "Cross-validation folds");
  cmd->add_option("--train-fraction", f.train_fraction, "Training share of each outer training fold");
  cmd->add_option("--importance-mode", f.importance_mode, "weighted|literal");
  cmd->add_option("--positive", f.positive, "severe|non-severe");
  cmd->add_option("--threshold", f.threshold, "Decision threshold on the severe score");
  cmd->add_flag("--no-class-weighting", f.no_class_weighting, "Unit sample weights");
  cmd->add_flag("--no-refit", f.no_refit, "Test the grid-search model instead of refitting");
}

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": '" + item + "' is not an integer");
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
  return out;
}

// defaults < --config file < flags
RunConfig resolve_config(const CommonFlags& f) {
  RunConfig c;
  if (!f.config.empty()) c = load_run_config(f.config, c);
  if (f.seed) {
    c.seed = *f.seed;
    c.protocol_seed.reset();
  }
  if (f.protocol_seed) c.protocol_seed = *f.protocol_seed;
  auto& p = c.protocol;
  if (f.trees) p.forest.trees = *f.trees;
  if (f.features_per_node) p.forest.tree.features_per_node = *f.features_per_node;
  if (f.min_leaf_weight) p.forest.tree.min_leaf_weight = *f.min_leaf_weight;
  if (f.max_depth) p.forest.tree.max_depth = *f.max_depth;
  if (f.no_class_weighting) p.forest.class_weighting = false;
  if (!f.k_grid.empty()) p.k_grid = parse_int_list(f.k_grid, "--k-grid");
  if (f.folds) p.folds = *f.folds;
  if (f.train_fraction) p.train_fraction = *f.train_fraction;
  if (!f.importance_mode.empty()) {
    try {
      p.importance_mode = parse_decrease_mode(f.importance_mode);
    } catch (const Error& e) {
      throw UsageError(std::string("--importance-mode: ") + e.what());
    }
  }
  if (!f.positive.empty()) {
    const auto label = parse_label(f.positive);
    if (!label) throw UsageError("--positive must be 'severe' or 'non-severe'");
    p.positive = *label;
  }
  if (f.threshold) p.decision_threshold = *f.threshold;
  if (f.no_refit) p.refit = false;
  try {
    c.resolved_protocol().validate();
  } catch (const InvalidInputError& e) {
    throw UsageError(e.what());
  }
  return c;
}

// Input paths come from flags, falling back to the embedded config so an
// artifact passed to --config replays its run.
std::string input_path(RunConfig& c, const std::string& key, const std::string& flag_value) {
  if (!flag_value.empty()) {
    c.inputs[key] = flag_value;
    return flag_value;
  }
  if (c.inputs.contains(key) && c.inputs.at(key).is_string()) return c.inputs.at(key).get<std::string>();
  throw UsageError("--" + key + " is required");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create directory " + dir.string());
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) ensure_dir(file.parent_path());
}

ordered_json artifact_header(const RunConfig& c) {
  ordered_json j;
  j["tool"] = tool_json();
  j["run_config"] = run_config_to_json(c);
  return j;
}

// CSV tables keep a plain header, so their run record sits beside them.
void write_sidecar(const fs::path& artifact, const RunConfig& c) {
  write_text(fs::path(artifact.string() + ".run.json"), artifact_header(c).dump(2) + "\n");
}

std::string cell(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

std::vector<FeatureId> feature_ids_from(const std::vector<int>& raw) {
  std::vector<FeatureId> ids;
  for (int v : raw) {
    if (!is_valid_feature_id(v)) throw UsageError("feature id " + std::to_string(v) + " outside 1..63");
    if (std::find(ids.begin(), ids.end(), v) != ids.end()) {
      throw UsageError("feature id " + std::to_string(v) + " listed twice");
    }
    ids.push_back(v);
  }
  return ids;
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": malformed JSON: " + e.what());
  }
}

// ---- phantom ---------------------------------------------------------------

struct PhantomEntry {
  std::string id;
  std::optional<Label> label;
  PhantomSpec spec;
};

std::vector<PhantomEntry> phantom_entries(const nlohmann::json& doc, std::uint64_t master_seed) {
  const nlohmann::json* patients = &doc;
  nlohmann::json defaults = nlohmann::json::object();
  if (doc.is_object()) {
    if (!doc.contains("patients")) throw SpecError("phantom spec: missing 'patients'");
    patients = &doc.at("patients");
    if (doc.contains("defaults")) defaults = doc.at("defaults");
  }
  if (!patients->is_array() || patients->empty()) throw SpecError("phantom spec: 'patients' must be a non-empty array");
  if (!defaults.is_object()) throw SpecError("phantom spec: 'defaults' must be an object");

  std::vector<PhantomEntry> entries;
  for (std::size_t i = 0; i < patients->size(); ++i) {
    const auto& p = (*patients)[i];
    if (!p.is_object()) throw SpecError("phantom spec: patient " + std::to_string(i + 1) + " is not an object");
    PhantomEntry e;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "P%03zu", i + 1);
    e.id = p.contains("id") ? p.at("id").get<std::string>() : std::string(buf);
    if (e.id.empty() || e.id.find_first_of("/\\,\"\n") != std::string::npos) {
      throw SpecError("phantom spec: invalid patient id '" + e.id + "'");
    }
    for (const auto& prev : entries) {
      if (prev.id == e.id) throw SpecError("phantom spec: duplicate patient id '" + e.id + "'");
    }
    if (p.contains("label")) {
      e.label = parse_label(p.at("label").get<std::string>());
      if (!e.label) throw SpecError("phantom spec: patient " + e.id + " has an unknown label");
    }
    nlohmann::json merged = defaults;
    for (const auto& [key, value] : p.items()) {
      if (key != "id" && key != "label") merged[key] = value;
    }
    if (!merged.contains("seed")) merged["seed"] = derive_seed(master_seed, i);
    try {
      e.spec = PhantomSpec::from_json(merged);
    } catch (const SpecError& err) {
      throw SpecError("patient " + e.id + ": " + err.what());
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

int cmd_phantom(const CommonFlags& f, const std::string& spec_path, std::ostream& out) {
  RunConfig c = resolve_config(f);
  const std::string spec_file = input_path(c, "spec", spec_path);
  nlohmann::json doc;
  try {
    doc = read_json_file(spec_file);
  } catch (const ParseError& e) {
    throw SpecError(e.what());
  }
  std::vector<PhantomEntry> entries;
  try {
    entries = phantom_entries(doc, c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("phantom spec: ") + e.what());
  }

  const fs::path dir = f.out;
  ensure_dir(dir);
  std::string manifest = "patient_id,label,ct,labels,infection\n";
  for (const auto& e : entries) {
    const Phantom ph = generate_phantom(e.spec);
    const std::string ct = e.id + "_ct.json", labels = e.id + "_labels.json", inf = e.id + "_infection.json";
    save_volume(dir / ct, ph.ct);
    save_label_map(dir / labels, ph.labels);
    save_infection(dir / inf, ph.infection);
    manifest += csv_escape(e.id) + "," + (e.label ? label_name(*e.label) : "") + "," + ct + "," + labels + "," + inf +
                "\n";
  }
  write_text(dir / "manifest.csv", manifest);
  write_sidecar(dir / "manifest.csv", c);
  out << "wrote " << entries.size() << " phantoms to " << dir.string() << "\n";
  return kExitOk;
}

// ---- extract ---------------------------------------------------------------

int cmd_extract(const CommonFlags& f, const std::string& manifest_flag, std::ostream& out, std::ostream& err) {
  RunConfig c = resolve_config(f);
  const fs::path manifest = input_path(c, "manifest", manifest_flag);
  std::ifstream in(manifest);
  if (!in) throw ParseError("cannot open manifest " + manifest.string());

  std::string line;
  if (!std::getline(in, line)) throw ParseError(manifest.string() + ": empty manifest");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  auto col = [&](const char* name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError(manifest.string() + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_id = col("patient_id"), c_ct = col("ct"), c_labels = col("labels"), c_inf = col("infection");
  const auto label_it = std::find(header.begin(), header.end(), "label");
  const std::optional<std::size_t> c_label =
      label_it == header.end() ? std::nullopt : std::optional<std::size_t>(label_it - header.begin());

  const fs::path base = manifest.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  FeatureTable table = feature_table_with_all_features();
  std::size_t failures = 0, line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    const std::string where = manifest.string() + ":" + std::to_string(line_no);
    if (cells.size() != header.size()) {
      err << "error: " << where << ": expected " << header.size() << " cells, got " << cells.size() << "\n";
      ++failures;
      continue;
    }
    const std::string& id = cells[c_id];
    try {
      std::optional<Label> label;
      if (c_label && !cells[*c_label].empty()) {
        label = parse_label(cells[*c_label]);
        if (!label) throw InvalidInputError("unknown label '" + cells[*c_label] + "'");
      }
      const CtVolume ct = load_volume(resolve(cells[c_ct]));
      const RegionLabelMap labels = load_label_map(resolve(cells[c_labels]));
      const InfectionMask infection = load_infection(resolve(cells[c_inf]));
      table.add_row(id, label, extract_features(ct, labels, infection, c.lobe_map));
    } catch (const Error& e) {
      err << "error: patient " << id << ": " << e.what() << "\n";
      ++failures;
    }
  }

  const fs::path out_path = f.out;
  ensure_parent(out_path);
  write_feature_table(out_path, table);
  write_sidecar(out_path, c);
  out << "extracted " << table.rows() << " patients to " << out_path.string();
  if (failures > 0) out << " (" << failures << " failed)";
  out << "\n";
  return failures > 0 ? kExitDataError : kExitOk;
}

// ---- cohort ----------------------------------------------------------------

struct CohortFlags {
  std::string spec;
  std::optional<std::size_t> non_severe;
  std::optional<std::size_t> severe;
  std::string signal;
  std::optional<double> separation;
  std::string mode;
};

int cmd_cohort(const CommonFlags& f, const CohortFlags& cf, std::ostream& out) {
  RunConfig c = resolve_config(f);
  // A replayed config carries the cohort it generated; flags override it.
  nlohmann::json spec_json = nlohmann::json::object();
  std::size_t non_severe = 121, severe = 55;
  if (c.inputs.contains("cohort") && c.inputs["cohort"].is_object()) {
    spec_json = nlohmann::json::parse(c.inputs["cohort"].dump());
    non_severe = spec_json.value("non_severe", non_severe);
    severe = spec_json.value("severe", severe);
    spec_json.erase("non_severe");
    spec_json.erase("severe");
  }
  if (!cf.spec.empty()) {
    c.inputs["spec"] = cf.spec;
    spec_json = read_json_file(cf.spec);
    if (!spec_json.is_object()) throw SpecError("cohort spec must be a JSON object");
  }
  if (!cf.signal.empty()) spec_json["signal_ids"] = parse_int_list(cf.signal, "--signal");
  if (cf.separation) spec_json["separation"] = *cf.separation;
  if (!cf.mode.empty()) spec_json["mode"] = cf.mode;
  if (cf.non_severe) non_severe = *cf.non_severe;
  if (cf.severe) severe = *cf.severe;
  const CohortSpec spec = CohortSpec::from_json(spec_json);
  c.inputs["cohort"] = spec_json;
  c.inputs["cohort"]["non_severe"] = non_severe;
  c.inputs["cohort"]["severe"] = severe;

  const Dataset data = synth_cohort(spec, non_severe, severe, c.seed);
  FeatureTable table = feature_table_with_all_features();
  for (std::size_t r = 0; r < data.rows(); ++r) {
    FeatureVector v;
    for (std::size_t col = 0; col < data.columns(); ++col) v[data.feature_ids()[col]] = data.value(r, col);
    table.add_row(data.row_name(r), data.label(r), v);
  }
  const fs::path out_path = f.out;
  ensure_parent(out_path);
  write_feature_table(out_path, table);
  write_sidecar(out_path, c);
  out << "wrote " << data.rows() << " synthetic patients to " << out_path.string() << "\n";
  return kExitOk;
}

// ---- train / predict / importance ------------------------------------------

struct TrainFlags {
  std::string features;
  std::string feature_ids;
  std::optional<int> top_k;
};

Forest with_threshold(const Forest& f, double threshold) {
  return Forest(f.params(), f.seed(), f.class_weights(), f.feature_ids(), f.trees(), threshold);
}

int cmd_train(const CommonFlags& f, const TrainFlags& tf, std::ostream& out) {
  RunConfig c = resolve_config(f);
  const std::string features = input_path(c, "features", tf.features);
  if (!tf.feature_ids.empty()) c.inputs["feature_ids"] = parse_int_list(tf.feature_ids, "--feature-ids");
  if (tf.top_k) c.inputs["top_k"] = *tf.top_k;
  if (c.inputs.contains("feature_ids") && c.inputs.contains("top_k")) {
    throw UsageError("--feature-ids and --top-k are mutually exclusive");
  }

  const FeatureTable table = read_feature_table(fs::path(features));
  std::vector<FeatureId> ids = table.columns;
  if (c.inputs.contains("feature_ids")) ids = feature_ids_from(c.inputs.at("feature_ids").get<std::vector<int>>());
  const Dataset data = table.to_dataset(ids);
  const auto& p = c.protocol;

  Forest forest = [&] {
    if (!c.inputs.contains("top_k")) return fit_forest(data, p.forest, c.seed, f.jobs);
    const int k = c.inputs.at("top_k").get<int>();
    if (k < 1 || k > static_cast<int>(data.columns())) {
      throw UsageError("--top-k must be within 1.." + std::to_string(data.columns()));
    }
    const Forest full = fit_forest(data, p.forest, derive_seed(c.seed, 0), f.jobs);
    const auto selected = top_k(importance_vector(full, p.importance_mode), k);
    return fit_forest(data.select_features(selected), p.forest, derive_seed(c.seed, 1000 + static_cast<std::uint64_t>(k)),
                      f.jobs);
  }();
  forest = with_threshold(forest, p.decision_threshold);

  ordered_json model = forest_to_json(forest);
  const ordered_json head = artifact_header(c);
  model["tool"] = head["tool"];
  model["run_config"] = head["run_config"];
  const fs::path out_path = f.out;
  ensure_parent(out_path);
  write_text(out_path, model.dump() + "\n");
  out << "trained " << forest.trees().size() << " trees on " << data.rows() << " rows, " << forest.feature_ids().size()
      << " features -> " << out_path.string() << "\n";
  return kExitOk;
}

bool same_file(const fs::path& a, const fs::path& b) {
  std::error_code ec;
  if (fs::exists(a, ec) && fs::exists(b, ec)) return fs::equivalent(a, b, ec);
  return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
}

int cmd_predict(const CommonFlags& f, const std::string& model_flag, const std::string& features_flag,
                std::ostream& out) {
  RunConfig c = resolve_config(f);
  const std::string model_path = input_path(c, "model", model_flag);
  const std::string features = input_path(c, "features", features_flag);
  const fs::path out_path = f.out;
  if (same_file(out_path, features)) throw InvalidInputError("--out must differ from the input feature table");

  const Forest forest = load_forest(model_path);
  FeatureTable table = read_feature_table(fs::path(features));
  std::vector<std::string> missing;
  for (FeatureId id : forest.feature_ids()) {
    if (std::find(table.columns.begin(), table.columns.end(), id) == table.columns.end()) {
      missing.push_back(feature_column(id));
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ",") + m;
    throw SchemaError(features + ": model expects columns missing from the table: " + list);
  }
  const Dataset data = table.to_unlabeled_dataset(forest.feature_ids());
  const auto scores = predict_scores(forest, data);

  // Replace output columns left by an earlier scoring pass.
  for (const char* name : {"score", "predicted_label"}) {
    const auto it = std::find(table.extra_columns.begin(), table.extra_columns.end(), name);
    if (it == table.extra_columns.end()) continue;
    const auto idx = static_cast<std::size_t>(it - table.extra_columns.begin());
    table.extra_columns.erase(it);
    for (auto& row : table.extra_values) row.erase(row.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  table.extra_columns.push_back("score");
  table.extra_columns.push_back("predicted_label");
  table.extra_values.resize(table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    table.extra_values[r].push_back(format_real(scores[r]));
    table.extra_values[r].push_back(label_name(label_for_score(scores[r], forest.decision_threshold())));
  }
  ensure_parent(out_path);
  write_feature_table(out_path, table);
  write_sidecar(out_path, c);
  out << "scored " << table.rows() << " rows -> " << out_path.string() << "\n";
  return kExitOk;
}

int cmd_importance(const CommonFlags& f, const std::string& model_flag, std::ostream& out) {
  RunConfig c = resolve_config(f);
  const std::string model_path = input_path(c, "model", model_flag);
  const Forest forest = load_forest(model_path);
  const fs::path dir = f.out;
  ensure_dir(dir);
  for (DecreaseMode mode : {DecreaseMode::Weighted, DecreaseMode::Literal}) {
    std::ostringstream csv;
    write_importance_csv(csv, importance_vector(forest, mode));
    write_text(dir / (std::string("importance_") + decrease_mode_name(mode) + ".csv"), csv.str());
  }
  write_text(dir / "importance_run.json", artifact_header(c).dump(2) + "\n");
  out << "wrote importance for " << forest.feature_ids().size() << " features to " << dir.string() << "\n";
  return kExitOk;
}

// ---- protocol --------------------------------------------------------------

std::vector<std::pair<double, double>> roc_xy(const RocCurve& roc) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : roc.points) xy.emplace_back(p.fpr, p.tpr);
  return xy;
}

std::string roc_rows(const RocCurve& roc, const std::string& prefix) {
  std::string s;
  for (const auto& p : roc.points) {
    s += prefix + (std::isinf(p.threshold) ? std::string("inf") : format_real(p.threshold)) + "," +
         format_real(p.fpr) + "," + format_real(p.tpr) + "\n";
  }
  return s;
}

std::string auc_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

void write_protocol_outputs(const fs::path& dir, const RunConfig& c, const EvaluationReport& report) {
  ordered_json doc = artifact_header(c);
  doc["provenance"] = provenance_json();
  doc["report"] = report_to_json(report);
  write_text(dir / "report.json", doc.dump(2) + "\n");
  const std::string metadata = doc["run_config"].dump();

  std::string per_k = "K,TPR,TNR,Accuracy,AUC\n";
  std::string per_k_roc = "K,threshold,fpr,tpr\n";
  std::vector<std::string> categories;
  std::vector<BarSeries> bars{{"TPR", {}}, {"TNR", {}}, {"Accuracy", {}}};
  std::vector<LineSeries> roc_lines;
  for (const auto& k : report.per_k) {
    per_k += std::to_string(k.k) + "," + cell(k.metrics.tpr) + "," + cell(k.metrics.tnr) + "," +
             cell(k.metrics.accuracy) + "," + format_real(k.roc.auc) + "\n";
    per_k_roc += roc_rows(k.roc, std::to_string(k.k) + ",");
    categories.push_back("K=" + std::to_string(k.k));
    bars[0].values.push_back(k.metrics.tpr.value_or(0.0));
    bars[1].values.push_back(k.metrics.tnr.value_or(0.0));
    bars[2].values.push_back(k.metrics.accuracy.value_or(0.0));
    roc_lines.push_back({"K=" + std::to_string(k.k) + " AUC " + auc_text(k.roc.auc), roc_xy(k.roc), false});
  }
  write_text(dir / "per_k.csv", per_k);
  write_text(dir / "per_k_roc.csv", per_k_roc);
  write_text(dir / "roc.csv", "threshold,fpr,tpr\n" + roc_rows(report.pooled_roc, ""));

  std::string predictions = "patient_id,label,fold,score,predicted_label\n";
  for (std::size_t r = 0; r < report.rows; ++r) {
    predictions += csv_escape(report.row_names[r]) + "," + label_name(report.truth[r]) + "," +
                   std::to_string(report.assignment.fold_of_row[r]) + "," + format_real(report.test_scores[r]) + "," +
                   label_name(report.test_predictions[r]) + "\n";
  }
  write_text(dir / "predictions.csv", predictions);

  {
    std::ostringstream csv;
    write_importance_csv(csv, report.importance);
    write_text(dir / "importance.csv", csv.str());
  }
  if (report.importance_literal) {
    std::ostringstream csv;
    write_importance_csv(csv, *report.importance_literal);
    write_text(dir / "importance_literal.csv", csv.str());
  }

  write_text(dir / "per_k_metrics.svg",
             svg_bar_chart({"Validation metrics per K", "K", "rate", metadata}, categories, bars));
  write_text(dir / "per_k_roc.svg",
             svg_line_chart({"Validation ROC per K", "false positive rate", "true positive rate", metadata},
                            roc_lines, 0.0, 1.0, 0.0, 1.0, true));
  write_text(dir / "roc.svg",
             svg_line_chart({"Test ROC (pooled), K=" + std::to_string(report.chosen_k) + ", AUC " +
                                 auc_text(report.pooled_roc.auc),
                             "false positive rate", "true positive rate", metadata},
                            {{"pooled test", roc_xy(report.pooled_roc), false}}, 0.0, 1.0, 0.0, 1.0, true));

  std::string ratios = "patient_id,label,ggo_ratio,consolidation_ratio\n";
  std::vector<LineSeries> ratio_lines{{feature_name(59), {}, true}, {feature_name(61), {}, true}};
  double y_max = 0.0;
  std::string title = "Per-patient GGO vs consolidation ratio";
  if (report.ratios) {
    const auto& rc = *report.ratios;
    for (std::size_t r = 0; r < rc.ggo.size(); ++r) {
      ratios += csv_escape(report.row_names[r]) + "," + label_name(report.truth[r]) + "," + format_real(rc.ggo[r]) +
                "," + format_real(rc.consolidation[r]) + "\n";
      const double x = static_cast<double>(r + 1);
      ratio_lines[0].points.emplace_back(x, rc.ggo[r]);
      ratio_lines[1].points.emplace_back(x, rc.consolidation[r]);
      y_max = std::max({y_max, rc.ggo[r], rc.consolidation[r]});
    }
    if (rc.test) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), " (paired t = %.3g, p = %.3g)", rc.test->t, rc.test->p);
      title += buf;
    }
  }
  write_text(dir / "ratios.csv", ratios);
  write_text(dir / "ratios.svg",
             svg_line_chart({title, "patient", "ratio of lung volume", metadata}, ratio_lines, 0.0,
                            static_cast<double>(report.rows + 1), 0.0, y_max > 0.0 ? y_max * 1.05 : 1.0));
}

int cmd_protocol(const CommonFlags& f, const std::string& features_flag, std::ostream& out) {
  RunConfig c = resolve_config(f);
  const std::string features = input_path(c, "features", features_flag);
  const FeatureTable table = read_feature_table(fs::path(features));
  const Dataset data = table.to_dataset();
  const EvaluationReport report = run_protocol(data, c.resolved_protocol(), f.jobs);

  const fs::path dir = f.out;
  ensure_dir(dir);
  write_protocol_outputs(dir, c, report);

  char buf[160];
  std::snprintf(buf, sizeof(buf), "chosen K=%d  pooled TPR=%s TNR=%s Accuracy=%s AUC=%.4f\n", report.chosen_k,
                cell(report.pooled.tpr).c_str(), cell(report.pooled.tnr).c_str(), cell(report.pooled.accuracy).c_str(),
                report.pooled_roc.auc);
  out << buf << "report written to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ctsev: CT severity features, weighted random forest and evaluation protocol"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("ctsev ") + tool_version());

  CommonFlags flags;
  std::string spec, manifest, features, model;
  CohortFlags cohort_flags;
  TrainFlags train_flags;

  auto* phantom = app.add_subcommand("phantom", "Generate QLV phantoms and a manifest from a spec");
  add_common(phantom, flags, true);
  phantom->add_option("--spec", spec, "Phantom spec JSON");

  auto* extract = app.add_subcommand("extract", "Extract the 63 features for every manifest row");
  add_common(extract, flags, true);
  extract->add_option("--manifest", manifest, "Manifest CSV");

  auto* cohort = app.add_subcommand("cohort", "Write a synthetic labeled feature table");
  add_common(cohort, flags, true);
  cohort->add_option("--spec", cohort_flags.spec, "Cohort spec JSON")->check(CLI::ExistingFile);
  cohort->add_option("--non-severe", cohort_flags.non_severe, "Non-severe rows");
  cohort->add_option("--severe", cohort_flags.severe, "Severe rows");
  cohort->add_option("--signal", cohort_flags.signal, "Comma-separated feature ids shifted in severe rows");
  cohort->add_option("--separation", cohort_flags.separation, "Shift in standard deviations");
  cohort->add_option("--mode", cohort_flags.mode, "distribution|phantom");

  auto* train = app.add_subcommand("train", "Fit a forest and write the model JSON");
  add_common(train, flags, true);
  add_model_flags(train, flags);
  train->add_option("--features", train_flags.features, "Labeled feature CSV");
  auto* ids_opt = train->add_option("--feature-ids", train_flags.feature_ids, "Comma-separated feature ids");
  train->add_option("--top-k", train_flags.top_k, "Train on the K most important features")->excludes(ids_opt);

  auto* predict_cmd = app.add_subcommand("predict", "Score a feature table with a model");
  add_common(predict_cmd, flags, true);
  predict_cmd->add_option("--model", model, "Model JSON");
  predict_cmd->add_option("--features", features, "Feature CSV");

  auto* protocol = app.add_subcommand("protocol", "Run the cross-validated evaluation protocol");
  add_common(protocol, flags, true);
  add_model_flags(protocol, flags);
  protocol->add_option("--features", features, "Labeled feature CSV");

  auto* importance = app.add_subcommand("importance", "Write importance CSVs for a model");
  add_common(importance, flags, true);
  importance->add_option("--model", model, "Model JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  const LogSink previous = set_warning_sink([&err](std::string_view msg) { err << "warning: " << msg << "\n"; });
  int code = kExitOk;
  try {
    if (phantom->parsed()) code = cmd_phantom(flags, spec, out);
    else if (extract->parsed()) code = cmd_extract(flags, manifest, out, err);
    else if (cohort->parsed()) code = cmd_cohort(flags, cohort_flags, out);
    else if (train->parsed()) code = cmd_train(flags, train_flags, out);
    else if (predict_cmd->parsed()) code = cmd_predict(flags, model, features, out);
    else if (protocol->parsed()) code = cmd_protocol(flags, features, out);
    else if (importance->parsed()) code = cmd_importance(flags, model, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    code = kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    code = kExitDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    code = kExitDataError;
  } catch (const InvariantViolation& e) {
    err << "internal error: " << e.what() << "\n";
    code = kExitInvariant;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    code = kExitInvariant;
  }
  set_warning_sink(previous);
  return code;
}

}  // namespace ctsev::cli
