#pragma once

#include <span>

namespace ctsev {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct PairedTTest {
  double t = 0.0;
  double p = 1.0;
  double df = 0.0;
  double mean_difference = 0.0;
};

// Paired t-test on a - b. Throws InvalidInputError for unequal lengths or
// n < 2, DegenerateError when the differences have zero variance.
PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace ctsev
