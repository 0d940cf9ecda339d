#include "ctsev/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace ctsev {

ClassificationMetrics confusion_metrics(std::span<const Label> truth, std::span<const Label> predicted, Label positive) {
  if (truth.size() != predicted.size()) throw InvalidInputError("truth and predictions differ in length");
  ClassificationMetrics m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool actual = truth[i] == positive;
    const bool flagged = predicted[i] == positive;
    if (actual) (flagged ? m.counts.tp : m.counts.fn)++;
    else (flagged ? m.counts.fp : m.counts.tn)++;
  }
  const auto& c = m.counts;
  if (c.tp + c.fn > 0) m.tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (c.tn + c.fp > 0) m.tnr = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  if (c.total() > 0) m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  return m;
}

RocCurve roc_curve(std::span<const Label> truth, std::span<const double> scores, Label positive) {
  if (truth.size() != scores.size()) throw InvalidInputError("truth and scores differ in length");
  std::size_t n_pos = 0;
  for (Label l : truth) n_pos += (l == positive) ? 1 : 0;
  const std::size_t n_neg = truth.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DegenerateError("undefined ROC: both classes must be present");

  std::vector<std::size_t> order(truth.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      (truth[order[i]] == positive ? tp : fp)++;
      ++i;
    }
    curve.points.push_back({s, static_cast<double>(fp) / static_cast<double>(n_neg),
                            static_cast<double>(tp) / static_cast<double>(n_pos)});
  }
  curve.auc = auc(curve.points);
  return curve;
}

double auc(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return area;
}

double auc(const RocCurve& curve) { return auc(curve.points); }

}  // namespace ctsev
