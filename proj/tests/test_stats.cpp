#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "campnet/rng.hpp"
#include "campnet/stats.hpp"

#include <vector>

using namespace campnet;
using doctest::Approx;

TEST_CASE("mean and sample variance") {
  std::vector<double> xs{2.0, 4.0, 6.0, 8.0};
  CHECK(stats::mean(xs) == Approx(5.0));
  CHECK(stats::sample_variance(xs) == Approx(20.0 / 3.0));

  std::vector<double> constant{3.0, 3.0, 3.0};
  CHECK(stats::sample_variance(constant) == Approx(0.0));
}

TEST_CASE("welch t-test against independent recomputation") {
  // Reference values from scipy.stats.ttest_ind(equal_var=False).
  std::vector<double> a{12.0, 15.0, 11.0, 14.0};
  std::vector<double> b{8.0, 9.0, 7.0, 10.0};
  auto r = stats::welch_t_test(a, b);
  CHECK(r.t == Approx(4.024922359499621).epsilon(1e-12));
  CHECK(r.df == Approx(5.4).epsilon(1e-12));
  CHECK(r.p == Approx(0.008600840752494518).epsilon(1e-9));
}

TEST_CASE("welch t-test on near-constant samples") {
  std::vector<double> a{2000.0, 2000.0, 2000.0};
  std::vector<double> b{870.0, 870.0, 871.0};
  auto r = stats::welch_t_test(a, b);
  CHECK(r.t == Approx(3389.0).epsilon(1e-9));
  CHECK(r.df == Approx(2.0).epsilon(1e-12));
  CHECK(r.p == Approx(8.706764655498374e-08).epsilon(1e-9));
}

TEST_CASE("welch t-test degenerate cases") {
  std::vector<double> a{5.0, 5.0};
  std::vector<double> b{5.0, 5.0};
  CHECK(stats::welch_t_test(a, b).p == Approx(1.0));

  std::vector<double> c{7.0, 7.0};
  CHECK(stats::welch_t_test(a, c).p == Approx(0.0));
}

TEST_CASE("welch t-test symmetry and identity") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a, b;
    auto na = 2 + rng.next_below(6), nb = 2 + rng.next_below(6);
    for (std::uint64_t i = 0; i < na; ++i) a.push_back(static_cast<double>(rng.next_below(50)));
    for (std::uint64_t i = 0; i < nb; ++i) b.push_back(static_cast<double>(rng.next_below(50)));
    auto fwd = stats::welch_t_test(a, b);
    auto rev = stats::welch_t_test(b, a);
    CHECK(fwd.t == Approx(-rev.t).epsilon(1e-12));
    CHECK(fwd.p == Approx(rev.p).epsilon(1e-12));
    CHECK(fwd.p >= 0.0);
    CHECK(fwd.p <= 1.0);

    auto self = stats::welch_t_test(a, a);
    CHECK(self.p == Approx(1.0));
  }
}

TEST_CASE("identical samples give p near 1") {
  std::vector<double> a{10.0, 10.0, 10.0, 10.0};
  std::vector<double> b{10.0, 10.0, 10.0, 10.0};
  auto r = stats::welch_t_test(a, b);
  CHECK(r.p == Approx(1.0));
}
