#include "campnet/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <stdexcept>

namespace campnet::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_variance: need >= 2 values");
  double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("welch_t_test: both samples need >= 2 values");
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double m1 = mean(a);
  const double m2 = mean(b);
  const double v1 = sample_variance(a);
  const double v2 = sample_variance(b);
  const double se2 = v1 / n1 + v2 / n2;

  WelchResult r;
  if (se2 == 0.0) {
    r.t = 0.0;
    r.df = n1 + n2 - 2.0;
    r.p = (m1 == m2) ? 1.0 : 0.0;
    return r;
  }
  r.t = (m1 - m2) / std::sqrt(se2);
  r.df = se2 * se2 /
         ((v1 / n1) * (v1 / n1) / (n1 - 1.0) + (v2 / n2) * (v2 / n2) / (n2 - 1.0));
  boost::math::students_t_distribution<double> dist(r.df);
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  if (r.p > 1.0) r.p = 1.0;
  return r;
}

}  // namespace campnet::stats
