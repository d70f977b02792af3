#pragma once

#include <span>

namespace campnet::stats {

double mean(std::span<const double> xs);

// Unbiased sample variance (n-1 denominator). Requires n >= 2.
double sample_variance(std::span<const double> xs);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

// Welch's unequal-variance t-test. Both samples need >= 2 values.
// Degenerate case: both variances zero yields p = 1 for equal means,
// p = 0 otherwise.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace campnet::stats
