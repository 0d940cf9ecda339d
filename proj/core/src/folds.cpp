#include "ctsev/folds.hpp"

#include <algorithm>
#include <cmath>

#include "ctsev/random.hpp"

namespace ctsev {

std::vector<std::size_t> FoldAssignment::rows_in(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fold_of_row.size(); ++r) {
    if (fold_of_row[r] == fold) rows.push_back(r);
  }
  return rows;
}

std::vector<std::size_t> FoldAssignment::rows_not_in(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fold_of_row.size(); ++r) {
    if (fold_of_row[r] != fold) rows.push_back(r);
  }
  return rows;
}

namespace {

std::array<std::vector<std::size_t>, kClassCount> rows_by_class(std::span<const Label> labels) {
  std::array<std::vector<std::size_t>, kClassCount> by_class;
  for (std::size_t r = 0; r < labels.size(); ++r) by_class[class_index(labels[r])].push_back(r);
  return by_class;
}

}  // namespace

FoldAssignment stratified_kfold(std::span<const Label> labels, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidInputError("stratified k-fold needs k >= 2");
  auto by_class = rows_by_class(labels);
  for (int c = 0; c < kClassCount; ++c) {
    if (by_class[c].size() < static_cast<std::size_t>(k)) {
      throw InfeasibleError(std::string("infeasible stratification: class '") + label_name(static_cast<Label>(c)) +
                            "' has " + std::to_string(by_class[c].size()) + " rows, fewer than k = " +
                            std::to_string(k));
    }
  }
  FoldAssignment out;
  out.folds = k;
  out.seed = seed;
  out.fold_of_row.assign(labels.size(), -1);
  std::size_t dealer = 0;
  for (int c = 0; c < kClassCount; ++c) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    rng.shuffle(by_class[c]);
    for (std::size_t r : by_class[c]) out.fold_of_row[r] = static_cast<int>(dealer++ % static_cast<std::size_t>(k));
  }
  return out;
}

TrainValidationSplit stratified_split(std::span<const Label> labels, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InfeasibleError("infeasible split: train fraction must lie strictly between 0 and 1");
  }
  auto by_class = rows_by_class(labels);
  TrainValidationSplit split;
  for (int c = 0; c < kClassCount; ++c) {
    auto& rows = by_class[c];
    // Guard against 0.7 * 10 landing a hair under 7.
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(rows.size()) * train_fraction + 0.5 + 1e-9));
    if (n_train == 0 || n_train >= rows.size()) {
      throw InfeasibleError(std::string("infeasible split: class '") + label_name(static_cast<Label>(c)) + "' with " +
                            std::to_string(rows.size()) + " rows leaves an empty side");
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    rng.shuffle(rows);
    split.train.insert(split.train.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.validation.insert(split.validation.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  return split;
}

}  // namespace ctsev
