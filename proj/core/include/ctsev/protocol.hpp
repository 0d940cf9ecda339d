#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctsev/dataset.hpp"
#include "ctsev/folds.hpp"
#include "ctsev/forest.hpp"
#include "ctsev/importance.hpp"
#include "ctsev/metrics.hpp"
#include "ctsev/stats.hpp"

namespace ctsev {

inline const std::vector<int>& default_k_grid() {
  static const std::vector<int> grid{63, 50, 40, 30, 20, 10};
  return grid;
}

struct ProtocolConfig {
  std::uint64_t seed = 20200301;
  ForestParams forest;
  std::vector<int> k_grid = default_k_grid();
  int folds = 3;
  double train_fraction = 0.7;
  DecreaseMode importance_mode = DecreaseMode::Weighted;
  // Refit the chosen-K model on train + validation before testing; off
  // tests the grid-search model trained on the training part only.
  bool refit = true;
  double decision_threshold = 0.5;
  Label positive = Label::Severe;

  void validate() const;
};

nlohmann::ordered_json protocol_config_to_json(const ProtocolConfig& config);
// Keys missing from `j` keep the values in `base`.
ProtocolConfig protocol_config_from_json(const nlohmann::json& j, ProtocolConfig base = {});

struct KEvaluation {
  int k = 0;
  std::vector<FeatureId> features;  // importance order
  std::vector<Label> truth;
  std::vector<double> scores;
  ClassificationMetrics metrics;
  RocCurve roc;
};

struct GridSearchResult {
  int chosen_k = 0;
  std::vector<KEvaluation> per_k;  // grid order
  ImportanceVector ranking;        // all-feature model, configured mode

  const KEvaluation& chosen() const;
};

// Chooses max accuracy, then max AUC, then the smaller K. Returns an index
// into `candidates`.
std::size_t select_best_k(const std::vector<KEvaluation>& candidates);

// For every K: fit on all training features, rank by importance, refit on
// the top K, score the validation rows.
GridSearchResult grid_search_k(const Dataset& train, const Dataset& validation, const ProtocolConfig& config,
                               std::uint64_t seed, int jobs = 1);

struct FoldResult {
  int fold = 0;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> validation_rows;
  std::vector<std::size_t> test_rows;
  GridSearchResult grid;
  std::vector<FeatureId> selected_features;
  ClassificationMetrics test_metrics;
  double test_auc = 0.0;
  ImportanceVector final_importance;
  std::optional<ImportanceVector> final_importance_literal;
};

struct PooledK {
  int k = 0;
  ClassificationMetrics metrics;
  RocCurve roc;
};

struct RatioComparison {
  std::vector<double> ggo;            // feature 59 per patient
  std::vector<double> consolidation;  // feature 61 per patient
  std::optional<PairedTTest> test;
};

struct EvaluationReport {
  ProtocolConfig config;
  std::size_t rows = 0;
  std::array<std::size_t, kClassCount> class_counts{};
  std::vector<std::string> row_names;
  std::vector<Label> truth;
  FoldAssignment assignment;
  std::vector<FoldResult> folds;

  // Validation predictions pooled over folds, one entry per grid K.
  std::vector<PooledK> per_k;
  int chosen_k = 0;

  std::vector<double> test_scores;  // by dataset row
  std::vector<Label> test_predictions;
  ClassificationMetrics pooled;
  RocCurve pooled_roc;

  // Fold-averaged rates (nullopt if a fold lacked the class).
  std::optional<double> mean_tpr;
  std::optional<double> mean_tnr;
  std::optional<double> mean_accuracy;
  double mean_auc = 0.0;

  // Fold-final models' importance, averaged over folds.
  ImportanceVector importance;
  std::optional<ImportanceVector> importance_literal;

  std::optional<RatioComparison> ratios;
};

EvaluationReport run_protocol(const Dataset& data, const ProtocolConfig& config, int jobs = 1);

nlohmann::ordered_json report_to_json(const EvaluationReport& report);

}  // namespace ctsev
