#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "ctsev/error.hpp"
#include "ctsev/random.hpp"
#include "ctsev/stats.hpp"

namespace ctsev {
namespace {

double boost_two_sided(double t, double df) {
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

TEST(PairedTTest, HandComputedT) {
  const std::vector<double> a{2, 3, 4, 6}, b{1, 2, 3, 4};
  // d = {1,1,1,2}: mean 1.25, sd 0.5, se 0.25.
  const auto r = paired_t_test(a, b);
  EXPECT_NEAR(r.t, 5.0, 1e-12);
  EXPECT_EQ(r.df, 3.0);
  EXPECT_DOUBLE_EQ(r.mean_difference, 1.25);
  EXPECT_NEAR(r.p, boost_two_sided(5.0, 3.0), 1e-10);
}

TEST(PairedTTest, SignFollowsDifference) {
  const std::vector<double> a{1, 2, 3, 4}, b{2, 3, 4, 6};
  EXPECT_NEAR(paired_t_test(a, b).t, -5.0, 1e-12);
}

TEST(PairedTTest, Errors) {
  const std::vector<double> a{1, 2, 3};
  EXPECT_THROW(paired_t_test(a, a), DegenerateError);
  const std::vector<double> shifted{2, 3, 4};
  EXPECT_THROW(paired_t_test(a, shifted), DegenerateError);  // constant difference
  const std::vector<double> one{1}, two{1, 2};
  EXPECT_THROW(paired_t_test(one, one), InvalidInputError);
  EXPECT_THROW(paired_t_test(a, two), InvalidInputError);
}

TEST(StudentT, MatchesBoostAcrossRange) {
  for (double df : {1.0, 2.0, 3.0, 5.5, 10.0, 30.0, 175.0, 999.0}) {
    for (double t : {0.0, 0.01, 0.5, 1.0, 2.0, 3.5, 6.0, 12.0, 40.0}) {
      EXPECT_NEAR(student_t_two_sided_p(t, df), boost_two_sided(t, df), 1e-10) << "t=" << t << " df=" << df;
      EXPECT_NEAR(student_t_two_sided_p(-t, df), student_t_two_sided_p(t, df), 1e-15);
    }
  }
}

TEST(IncompleteBeta, MatchesBoost) {
  Rng rng(4);
  for (int i = 0; i < 300; ++i) {
    const double a = rng.uniform(0.1, 50), b = rng.uniform(0.1, 50), x = rng.uniform();
    EXPECT_NEAR(regularized_incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-10);
  }
  EXPECT_EQ(regularized_incomplete_beta(2, 3, 0.0), 0.0);
  EXPECT_EQ(regularized_incomplete_beta(2, 3, 1.0), 1.0);
}

TEST(PairedTTest, DetectsKnownEffect) {
  Rng rng(1);
  std::vector<double> ggo, cons;
  for (int i = 0; i < 1000; ++i) {
    const double base = rng.uniform(0.0, 0.2);
    ggo.push_back(base + 0.02 + rng.normal(0, 0.05));
    cons.push_back(base + rng.normal(0, 0.05));
  }
  const auto r = paired_t_test(ggo, cons);
  EXPECT_GT(r.t, 0.0);
  EXPECT_LT(r.p, 1e-6);
  EXPECT_NEAR(r.p, boost_two_sided(r.t, r.df), 1e-10);
}

}  // namespace
}  // namespace ctsev
