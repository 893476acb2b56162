#include <cmath>
#include <vector>

#include "doctest.h"
#include "stats.hpp"

using namespace horocover;

TEST_SUITE("stats") {
  TEST_CASE("moments and order statistics") {
    const std::vector<double> x{3.0, 1.0, 4.0, 1.0, 5.0};
    CHECK(mean(x) == doctest::Approx(2.8));
    CHECK(stddev(x) == doctest::Approx(std::sqrt(3.2)));
    CHECK(median(x) == 3.0);
    CHECK(median({1.0, 2.0, 3.0, 10.0}) == 2.5);
    const auto r = ranks(x);
    CHECK(r == std::vector<double>{3.0, 1.5, 4.0, 1.5, 5.0});
  }

  TEST_CASE("correlations and least squares") {
    const std::vector<double> x{1, 2, 3, 4, 5, 6};
    std::vector<double> y, z;
    for (double v : x) {
      y.push_back(2.0 * v - 1.0);
      z.push_back(std::exp(-v));
    }
    CHECK(pearson(x, y) == doctest::Approx(1.0));
    CHECK(spearman(x, z) == doctest::Approx(-1.0));
    const LinearFit f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(-1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
  }

  TEST_CASE("normal cdf and Kolmogorov tail") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(kolmogorov_survival(1.3580986393225507) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(kolmogorov_survival(0.0) == doctest::Approx(1.0));
  }

  TEST_CASE("KS test separates normal from shifted samples") {
    // Normal quantiles at (i - 1/2) / n: the closest possible fit.
    std::vector<double> q;
    const int n = 400;
    for (int i = 1; i <= n; ++i) {
      const double p = (i - 0.5) / n;
      double lo = -10, hi = 10;
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
      }
      q.push_back(0.5 * (lo + hi));
    }
    const KsResult good = ks_test_normal(q);
    CHECK(good.statistic == doctest::Approx(0.5 / n).epsilon(1e-6));
    CHECK(good.p_value > 0.99);
    for (double& v : q) v += 0.5;
    CHECK(ks_test_normal(q).p_value < 1e-6);
  }
}
