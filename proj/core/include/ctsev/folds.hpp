#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ctsev/dataset.hpp"

namespace ctsev {

struct FoldAssignment {
  std::vector<int> fold_of_row;
  int folds = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> rows_in(int fold) const;
  std::vector<std::size_t> rows_not_in(int fold) const;
};

// Each class is shuffled with its own stream and dealt round-robin, with the
// dealer continuing across classes, so fold sizes differ by at most one and
// every fold's class counts are within one of N_c / k. Throws
// InfeasibleError when a class has fewer than k rows.
FoldAssignment stratified_kfold(std::span<const Label> labels, int k, std::uint64_t seed);

struct TrainValidationSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Per class, round(N_c * fraction) (halves up) rows go to training. Indices
// refer to positions in `labels`, each side sorted ascending. Throws
// InfeasibleError when either side would lack a class.
TrainValidationSplit stratified_split(std::span<const Label> labels, double train_fraction, std::uint64_t seed);

}  // namespace ctsev
