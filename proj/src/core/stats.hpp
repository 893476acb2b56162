#pragma once

#include <cstddef>
#include <vector>

namespace horocover {

double mean(const std::vector<double>& x);
// Sample standard deviation (n - 1 denominator).
double stddev(const std::vector<double>& x);
double median(std::vector<double> x);

// Ranks with ties averaged, 1-based.
std::vector<double> ranks(const std::vector<double>& x);
double pearson(const std::vector<double>& x, const std::vector<double>& y);
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

double normal_cdf(double x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
// One-sample Kolmogorov-Smirnov test against N(0, 1). The p-value uses the
// asymptotic Kolmogorov distribution with Stephens' finite-n correction.
KsResult ks_test_normal(std::vector<double> samples);
// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

}  // namespace horocover
