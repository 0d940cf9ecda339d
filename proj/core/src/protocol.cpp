#include "ctsev/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "ctsev/forest_io.hpp"

namespace ctsev {

using ordered_json = nlohmann::ordered_json;

void ProtocolConfig::validate() const {
  if (forest.trees < 1) throw InvalidInputError("config: forest needs at least one tree");
  if (k_grid.empty()) throw InvalidInputError("config: K grid is empty");
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (k_grid[i] < 1 || k_grid[i] > kFeatureCount) {
      throw InvalidInputError("config: K = " + std::to_string(k_grid[i]) + " outside 1..63");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (k_grid[j] == k_grid[i]) throw InvalidInputError("config: K grid repeats " + std::to_string(k_grid[i]));
    }
  }
  if (folds < 2) throw InvalidInputError("config: need at least 2 folds");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidInputError("config: train fraction must lie strictly between 0 and 1");
  }
  if (!(decision_threshold >= 0.0 && decision_threshold <= 1.0)) {
    throw InvalidInputError("config: decision threshold must lie in [0,1]");
  }
}

ordered_json protocol_config_to_json(const ProtocolConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["forest"] = forest_params_to_json(c.forest);
  j["k_grid"] = c.k_grid;
  j["folds"] = c.folds;
  j["train_fraction"] = c.train_fraction;
  j["importance_mode"] = decrease_mode_name(c.importance_mode);
  j["refit"] = c.refit;
  j["decision_threshold"] = c.decision_threshold;
  j["positive_class"] = label_name(c.positive);
  return j;
}

ProtocolConfig protocol_config_from_json(const nlohmann::json& j, ProtocolConfig c) {
  if (!j.is_object()) throw ParseError("protocol config must be a JSON object");
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("forest")) c.forest = forest_params_from_json(j.at("forest"), c.forest);
    if (j.contains("k_grid")) c.k_grid = j.at("k_grid").get<std::vector<int>>();
    if (j.contains("folds")) c.folds = j.at("folds").get<int>();
    if (j.contains("train_fraction")) c.train_fraction = j.at("train_fraction").get<double>();
    if (j.contains("importance_mode")) c.importance_mode = parse_decrease_mode(j.at("importance_mode").get<std::string>());
    if (j.contains("refit")) c.refit = j.at("refit").get<bool>();
    if (j.contains("decision_threshold")) c.decision_threshold = j.at("decision_threshold").get<double>();
    if (j.contains("positive_class")) {
      const auto name = j.at("positive_class").get<std::string>();
      const auto label = parse_label(name);
      if (!label) throw ParseError("config: positive_class must be 'severe' or 'non-severe'");
      c.positive = *label;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("protocol config: ") + e.what());
  }
  c.validate();
  return c;
}

const KEvaluation& GridSearchResult::chosen() const {
  for (const auto& e : per_k) {
    if (e.k == chosen_k) return e;
  }
  throw InvariantViolation("chosen K missing from grid results");
}

namespace {

std::vector<double> positive_scores(std::span<const double> severe_scores, Label positive) {
  std::vector<double> out(severe_scores.begin(), severe_scores.end());
  if (positive == Label::NonSevere) {
    for (double& s : out) s = 1.0 - s;
  }
  return out;
}

std::vector<Label> predictions(std::span<const double> severe_scores, double threshold) {
  std::vector<Label> out;
  out.reserve(severe_scores.size());
  for (double s : severe_scores) out.push_back(label_for_score(s, threshold));
  return out;
}

// Top-k ids by importance among the dataset's active columns.
std::vector<FeatureId> ranked_features(const ImportanceVector& iv, const Dataset& data, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > data.columns()) {
    throw InvalidInputError("K = " + std::to_string(k) + " exceeds the " + std::to_string(data.columns()) +
                            " available features");
  }
  std::vector<FeatureId> ids;
  for (FeatureId id : iv.ranking()) {
    if (data.column_of(id)) ids.push_back(id);
    if (ids.size() == static_cast<std::size_t>(k)) break;
  }
  return ids;
}

bool rate_less(const std::optional<double>& a, const std::optional<double>& b) {
  return a.value_or(-1.0) < b.value_or(-1.0);
}

std::optional<ImportanceVector> try_importance(const Forest& forest, DecreaseMode mode) {
  try {
    return importance_vector(forest, mode);
  } catch (const DegenerateError&) {
    return std::nullopt;
  }
}

ImportanceVector zero_importance(DecreaseMode mode) {
  ImportanceVector iv;
  iv.mode = mode;
  return iv;
}

void accumulate_importance(ImportanceVector& into, const ImportanceVector& add, double scale) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    into.importance[i] += scale * add.importance[i];
    into.reduced_gini[i] += scale * add.reduced_gini[i];
    into.node_count[i] += add.node_count[i];
  }
}

}  // namespace

std::size_t select_best_k(const std::vector<KEvaluation>& c) {
  if (c.empty()) throw InvalidInputError("no K candidates to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    const auto& a = c[i];
    const auto& b = c[best];
    if (rate_less(b.metrics.accuracy, a.metrics.accuracy)) {
      best = i;
    } else if (!rate_less(a.metrics.accuracy, b.metrics.accuracy)) {
      if (a.roc.auc > b.roc.auc || (a.roc.auc == b.roc.auc && a.k < b.k)) best = i;
    }
  }
  return best;
}

GridSearchResult grid_search_k(const Dataset& train, const Dataset& validation, const ProtocolConfig& config,
                               std::uint64_t seed, int jobs) {
  config.validate();
  const Forest full = fit_forest(train, config.forest, derive_seed(seed, 0), jobs);
  GridSearchResult result;
  result.ranking = importance_vector(full, config.importance_mode);

  for (int k : config.k_grid) {
    KEvaluation e;
    e.k = k;
    e.features = ranked_features(result.ranking, train, k);
    const Forest model = fit_forest(train.select_features(e.features), config.forest,
                                    derive_seed(seed, 1000 + static_cast<std::uint64_t>(k)), jobs);
    e.scores = predict_scores(model, validation);
    e.truth.assign(validation.labels().begin(), validation.labels().end());
    e.metrics = confusion_metrics(e.truth, predictions(e.scores, config.decision_threshold), config.positive);
    e.roc = roc_curve(e.truth, positive_scores(e.scores, config.positive), config.positive);
    result.per_k.push_back(std::move(e));
  }
  result.chosen_k = result.per_k[select_best_k(result.per_k)].k;
  return result;
}

EvaluationReport run_protocol(const Dataset& data, const ProtocolConfig& config, int jobs) {
  config.validate();
  EvaluationReport report;
  report.config = config;
  report.rows = data.rows();
  report.class_counts = data.class_counts();
  report.truth.assign(data.labels().begin(), data.labels().end());
  for (std::size_t r = 0; r < data.rows(); ++r) report.row_names.push_back(data.row_name(r));

  report.assignment = stratified_kfold(data.labels(), config.folds, derive_seed(config.seed, 1));
  report.test_scores.assign(data.rows(), std::nan(""));
  report.test_predictions.assign(data.rows(), Label::NonSevere);
  report.importance = zero_importance(config.importance_mode);
  ImportanceVector literal_sum = zero_importance(DecreaseMode::Literal);
  bool literal_complete = true;

  double tpr_sum = 0.0, tnr_sum = 0.0, acc_sum = 0.0, auc_sum = 0.0;
  bool tpr_ok = true, tnr_ok = true, acc_ok = true;
  const double fold_scale = 1.0 / static_cast<double>(config.folds);

  for (int f = 0; f < config.folds; ++f) {
    FoldResult fold;
    fold.fold = f;
    fold.test_rows = report.assignment.rows_in(f);
    const auto rest = report.assignment.rows_not_in(f);
    std::vector<Label> rest_labels;
    for (std::size_t r : rest) rest_labels.push_back(data.label(r));
    const auto split = stratified_split(rest_labels, config.train_fraction,
                                        derive_seed(config.seed, 100 + static_cast<std::uint64_t>(f)));
    for (std::size_t i : split.train) fold.train_rows.push_back(rest[i]);
    for (std::size_t i : split.validation) fold.validation_rows.push_back(rest[i]);

    const Dataset train = data.subset_rows(fold.train_rows);
    const Dataset validation = data.subset_rows(fold.validation_rows);
    const std::uint64_t grid_seed = derive_seed(config.seed, 200 + static_cast<std::uint64_t>(f));
    fold.grid = grid_search_k(train, validation, config, grid_seed, jobs);
    fold.selected_features = fold.grid.chosen().features;

    const Forest final_model =
        config.refit
            ? fit_forest(data.subset_rows(rest).select_features(fold.selected_features), config.forest,
                         derive_seed(config.seed, 300 + static_cast<std::uint64_t>(f)), jobs)
            : fit_forest(train.select_features(fold.selected_features), config.forest,
                         derive_seed(grid_seed, 1000 + static_cast<std::uint64_t>(fold.grid.chosen_k)), jobs);

    const Dataset test = data.subset_rows(fold.test_rows);
    const auto scores = predict_scores(final_model, test);
    const auto predicted = predictions(scores, config.decision_threshold);
    for (std::size_t i = 0; i < fold.test_rows.size(); ++i) {
      report.test_scores[fold.test_rows[i]] = scores[i];
      report.test_predictions[fold.test_rows[i]] = predicted[i];
    }
    fold.test_metrics = confusion_metrics(test.labels(), predicted, config.positive);
    fold.test_auc = roc_curve(test.labels(), positive_scores(scores, config.positive), config.positive).auc;

    fold.final_importance = importance_vector(final_model, config.importance_mode);
    fold.final_importance_literal = try_importance(final_model, DecreaseMode::Literal);
    accumulate_importance(report.importance, fold.final_importance, fold_scale);
    if (fold.final_importance_literal) accumulate_importance(literal_sum, *fold.final_importance_literal, fold_scale);
    else literal_complete = false;

    if (fold.test_metrics.tpr) tpr_sum += *fold.test_metrics.tpr; else tpr_ok = false;
    if (fold.test_metrics.tnr) tnr_sum += *fold.test_metrics.tnr; else tnr_ok = false;
    if (fold.test_metrics.accuracy) acc_sum += *fold.test_metrics.accuracy; else acc_ok = false;
    auc_sum += fold.test_auc;
    report.folds.push_back(std::move(fold));
  }
  if (literal_complete) report.importance_literal = literal_sum;
  if (tpr_ok) report.mean_tpr = tpr_sum * fold_scale;
  if (tnr_ok) report.mean_tnr = tnr_sum * fold_scale;
  if (acc_ok) report.mean_accuracy = acc_sum * fold_scale;
  report.mean_auc = auc_sum * fold_scale;

  for (double s : report.test_scores) {
    if (std::isnan(s)) throw InvariantViolation("a row was never tested");
  }
  report.pooled = confusion_metrics(report.truth, report.test_predictions, config.positive);
  report.pooled_roc = roc_curve(report.truth, positive_scores(report.test_scores, config.positive), config.positive);

  std::vector<KEvaluation> pooled_candidates;
  for (std::size_t ki = 0; ki < config.k_grid.size(); ++ki) {
    KEvaluation pooled;
    pooled.k = config.k_grid[ki];
    for (const auto& fold : report.folds) {
      const auto& e = fold.grid.per_k[ki];
      pooled.truth.insert(pooled.truth.end(), e.truth.begin(), e.truth.end());
      pooled.scores.insert(pooled.scores.end(), e.scores.begin(), e.scores.end());
    }
    pooled.metrics = confusion_metrics(pooled.truth, predictions(pooled.scores, config.decision_threshold), config.positive);
    pooled.roc = roc_curve(pooled.truth, positive_scores(pooled.scores, config.positive), config.positive);
    report.per_k.push_back({pooled.k, pooled.metrics, pooled.roc});
    pooled_candidates.push_back(std::move(pooled));
  }
  report.chosen_k = pooled_candidates[select_best_k(pooled_candidates)].k;

  const auto ggo_col = data.column_of(59);
  const auto cons_col = data.column_of(61);
  if (ggo_col && cons_col) {
    RatioComparison ratios;
    for (std::size_t r = 0; r < data.rows(); ++r) {
      ratios.ggo.push_back(data.value(r, *ggo_col));
      ratios.consolidation.push_back(data.value(r, *cons_col));
    }
    try {
      ratios.test = paired_t_test(ratios.ggo, ratios.consolidation);
    } catch (const Error&) {
      ratios.test = std::nullopt;
    }
    report.ratios = std::move(ratios);
  }
  return report;
}

namespace {

ordered_json optional_rate(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json metrics_json(const ClassificationMetrics& m, std::optional<double> auc_value) {
  ordered_json j;
  j["tp"] = m.counts.tp;
  j["fn"] = m.counts.fn;
  j["tn"] = m.counts.tn;
  j["fp"] = m.counts.fp;
  j["tpr"] = optional_rate(m.tpr);
  j["tnr"] = optional_rate(m.tnr);
  j["accuracy"] = optional_rate(m.accuracy);
  if (auc_value) j["auc"] = *auc_value;
  return j;
}

ordered_json roc_json(const RocCurve& roc) {
  ordered_json points = ordered_json::array();
  for (const auto& p : roc.points) {
    points.push_back({std::isinf(p.threshold) ? ordered_json(nullptr) : ordered_json(p.threshold), p.fpr, p.tpr});
  }
  return points;
}

ordered_json importance_json(const ImportanceVector& iv) {
  ordered_json rows = ordered_json::array();
  int rank = 1;
  for (FeatureId id : iv.ranking()) {
    rows.push_back({{"rank", rank++},
                    {"feature_id", id},
                    {"feature_name", feature_name(id)},
                    {"importance", iv.importance_of(id)},
                    {"reduced_gini", iv.reduced_gini_of(id)},
                    {"node_count", iv.node_count_of(id)}});
  }
  return {{"mode", decrease_mode_name(iv.mode)}, {"features", std::move(rows)}};
}

}  // namespace

ordered_json report_to_json(const EvaluationReport& r) {
  ordered_json j;
  j["positive_class"] = label_name(r.config.positive);
  j["config"] = protocol_config_to_json(r.config);
  j["rows"] = r.rows;
  j["class_counts"] = {{"non-severe", r.class_counts[0]}, {"severe", r.class_counts[1]}};
  j["fold_assignment"] = {{"seed", r.assignment.seed}, {"fold_of_row", r.assignment.fold_of_row}};

  ordered_json folds = ordered_json::array();
  for (const auto& f : r.folds) {
    ordered_json fj;
    fj["fold"] = f.fold;
    fj["train_rows"] = f.train_rows;
    fj["validation_rows"] = f.validation_rows;
    fj["test_rows"] = f.test_rows;
    ordered_json per_k = ordered_json::array();
    for (const auto& e : f.grid.per_k) {
      ordered_json ej{{"k", e.k}};
      ej.update(metrics_json(e.metrics, e.roc.auc));
      ej["features"] = e.features;
      per_k.push_back(std::move(ej));
    }
    fj["per_k_validation"] = std::move(per_k);
    fj["chosen_k"] = f.grid.chosen_k;
    fj["selected_features"] = f.selected_features;
    fj["test"] = metrics_json(f.test_metrics, f.test_auc);
    folds.push_back(std::move(fj));
  }
  j["folds"] = std::move(folds);

  ordered_json per_k = ordered_json::array();
  for (const auto& p : r.per_k) {
    ordered_json pj{{"k", p.k}};
    pj.update(metrics_json(p.metrics, p.roc.auc));
    per_k.push_back(std::move(pj));
  }
  j["per_k_validation_pooled"] = std::move(per_k);
  j["chosen_k"] = r.chosen_k;

  j["pooled_test"] = metrics_json(r.pooled, r.pooled_roc.auc);
  j["fold_average_test"] = {{"tpr", optional_rate(r.mean_tpr)},
                            {"tnr", optional_rate(r.mean_tnr)},
                            {"accuracy", optional_rate(r.mean_accuracy)},
                            {"auc", r.mean_auc}};
  j["pooled_roc"] = roc_json(r.pooled_roc);

  ordered_json scores = ordered_json::array();
  for (std::size_t i = 0; i < r.rows; ++i) {
    scores.push_back({{"patient_id", r.row_names[i]},
                      {"label", label_name(r.truth[i])},
                      {"fold", r.assignment.fold_of_row[i]},
                      {"score", r.test_scores[i]},
                      {"predicted", label_name(r.test_predictions[i])}});
  }
  j["test_scores"] = std::move(scores);
  j["importance"] = importance_json(r.importance);
  j["importance_literal"] = r.importance_literal ? importance_json(*r.importance_literal) : ordered_json(nullptr);

  if (r.ratios) {
    ordered_json rj;
    rj["ggo_feature_id"] = 59;
    rj["consolidation_feature_id"] = 61;
    if (r.ratios->test) {
      rj["paired_t"] = {{"t", r.ratios->test->t},
                        {"p", r.ratios->test->p},
                        {"df", r.ratios->test->df},
                        {"mean_difference", r.ratios->test->mean_difference}};
    } else {
      rj["paired_t"] = nullptr;
    }
    j["ggo_vs_consolidation"] = std::move(rj);
  } else {
    j["ggo_vs_consolidation"] = nullptr;
  }
  return j;
}

}  // namespace ctsev
