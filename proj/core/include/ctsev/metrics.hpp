#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ctsev/dataset.hpp"

namespace ctsev {

// Severe is the positive class unless stated otherwise.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;

  std::size_t total() const { return tp + fn + tn + fp; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp; fn += o.fn; tn += o.tn; fp += o.fp;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

// Rates are nullopt when their denominator class is absent.
struct ClassificationMetrics {
  ConfusionCounts counts;
  std::optional<double> tpr;
  std::optional<double> tnr;
  std::optional<double> accuracy;
};

ClassificationMetrics confusion_metrics(std::span<const Label> truth, std::span<const Label> predicted,
                                        Label positive = Label::Severe);

struct RocPoint {
  double threshold;  // +inf for the (0,0) anchor
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Sweeps every distinct score from high to low, grouping ties into one step.
// `scores` are higher-is-more-positive. Throws DegenerateError unless both
// classes occur.
RocCurve roc_curve(std::span<const Label> truth, std::span<const double> scores, Label positive = Label::Severe);

// Trapezoidal area under the points.
double auc(const RocCurve& curve);
double auc(std::span<const RocPoint> points);

}  // namespace ctsev
