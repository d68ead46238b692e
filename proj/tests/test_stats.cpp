#include <cmath>

#include "bincp/stats.hpp"
#include "doctest.h"

using namespace bincp;

TEST_CASE("chi-square cdf matches closed forms for small df") {
  // df=2: CDF(x) = 1 - exp(-x/2). df=1: CDF(x) = erf(sqrt(x/2)).
  for (double x = 0.05; x < 20.0; x += 0.37) {
    CHECK(std::abs(chi2_cdf(2, x) - (1.0 - std::exp(-x / 2))) < 1e-12);
    CHECK(std::abs(chi2_cdf(1, x) - std::erf(std::sqrt(x / 2))) < 1e-12);
  }
  CHECK(chi2_cdf(4, 0.0) == 0.0);
}

TEST_CASE("chi-square cdf is monotone and normalized") {
  for (int df : {1, 2, 3, 5, 8, 13, 40}) {
    double prev = -1;
    for (double x = 0.0; x < 80.0; x += 0.5) {
      double p = chi2_cdf(df, x);
      CHECK(p >= prev);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      prev = p;
    }
    CHECK(chi2_cdf(df, 1e6) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("quantiles hit the reference values") {
  // df=2 has the closed form -2 ln(1-q).
  CHECK(std::abs(chi2_inverse_cdf(2, 0.9) - 4.605170185988091) < 1e-6);
  CHECK(std::abs(chi2_inverse_cdf(2, 0.5) - (-2 * std::log(0.5))) < 1e-9);
  CHECK(std::abs(chi2_inverse_cdf(5, 0.05) - 1.1455) < 5e-4);
  CHECK(std::abs(chi2_inverse_cdf(5, 0.01) - 0.5543) < 5e-4);
  CHECK(std::abs(chi2_inverse_cdf(4, 0.01) - 0.29711) < 5e-5);
}

TEST_CASE("quantile round trip is tight across a grid") {
  for (int df : {1, 2, 3, 4, 5, 7, 10, 20, 50}) {
    for (double q : {0.001, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.999}) {
      double x = chi2_inverse_cdf(df, q);
      CHECK(x > 0);
      CHECK(std::abs(chi2_cdf(df, x) - q) <= 1e-10);
    }
  }
}

TEST_CASE("quantiles are monotone in q and reject bad input") {
  for (int df : {1, 3, 6}) {
    double prev = 0;
    for (double q = 0.05; q < 1.0; q += 0.05) {
      double x = chi2_inverse_cdf(df, q);
      CHECK(x > prev);
      prev = x;
    }
  }
  CHECK_THROWS(chi2_inverse_cdf(0, 0.5));
  CHECK_THROWS(chi2_inverse_cdf(3, 0.0));
  CHECK_THROWS(chi2_inverse_cdf(3, 1.0));
}

TEST_CASE("exact statistic arithmetic") {
  RationalStat stat = pearson_statistic(std::vector<long long>{1, 3, 11, 5, 2, 2},
                                        std::vector<long long>{2, 4, 10, 4, 2, 2});
  CHECK(stat.den == 20);
  CHECK(stat.num == 22);
  CHECK(stat.to_double() == doctest::Approx(1.10).epsilon(1e-12));
  CHECK(stat.to_string() == "22/20");
  CHECK(stat.within(1.1455));
  CHECK(stat.within(1.10));
  CHECK(!stat.within(0.5543));

  RationalStat zero = pearson_statistic(std::vector<long long>{2, 4, 10, 4, 2, 2},
                                        std::vector<long long>{2, 4, 10, 4, 2, 2});
  CHECK(zero.is_zero());
  CHECK(zero.within(0.0));

  RationalStat other = pearson_statistic(std::vector<long long>{2, 5, 9, 4, 2, 2},
                                         std::vector<long long>{2, 4, 10, 4, 2, 2});
  CHECK(other.to_double() == doctest::Approx(0.35).epsilon(1e-12));
  CHECK(!(stat == other));
  CHECK(stat == RationalStat{22, 20});
  CHECK(stat == RationalStat{11, 10});  // equality is value-based
}

TEST_CASE("one-category interval matches the frozen worked values") {
  // Sample (3,5,2) out of 10, overall error rate 0.1, three categories.
  auto i1 = qh_interval(10, 3, 3, 0.1);
  auto i2 = qh_interval(10, 5, 3, 0.1);
  auto i3 = qh_interval(10, 2, 3, 0.1);
  CHECK(std::abs(i1.first - 0.0981) < 5e-4);
  CHECK(std::abs(i1.second - 0.6280) < 5e-4);
  CHECK(std::abs(i2.first - 0.2192) < 5e-4);
  CHECK(std::abs(i2.second - 0.7808) < 5e-4);
  CHECK(std::abs(i3.first - 0.0509) < 5e-4);
  CHECK(std::abs(i3.second - 0.5383) < 5e-4);

  auto all = simultaneous_intervals(std::vector<long long>{3, 5, 2}, 0.1);
  REQUIRE(all.size() == 3);
  CHECK(all[0] == i1);
  CHECK(all[1] == i2);
  CHECK(all[2] == i3);
}

TEST_CASE("intervals bracket the sample share and sit inside [0,1]") {
  for (long long n : {5, 10, 40, 200}) {
    for (long long c = 0; c <= n; c += std::max<long long>(1, n / 7)) {
      for (double alpha : {0.01, 0.05, 0.1, 0.2}) {
        auto [lo, hi] = qh_interval(n, c, 4, alpha);
        double phat = (double)c / (double)n;
        CHECK(lo >= 0.0);
        CHECK(hi <= 1.0);
        CHECK(lo <= phat + 1e-12);
        CHECK(hi >= phat - 1e-12);
        CHECK(lo <= hi);
      }
    }
  }
}

TEST_CASE("smaller error rates widen the intervals") {
  auto tight = qh_interval(30, 9, 3, 0.2);
  auto wide = qh_interval(30, 9, 3, 0.01);
  CHECK(wide.first <= tight.first);
  CHECK(wide.second >= tight.second);
}

TEST_CASE("interval input validation") {
  CHECK_THROWS(qh_interval(0, 0, 3, 0.1));
  CHECK_THROWS(qh_interval(10, -1, 3, 0.1));
  CHECK_THROWS(qh_interval(10, 11, 3, 0.1));
  CHECK_THROWS(qh_interval(10, 5, 1, 0.1));
  CHECK_THROWS(qh_interval(10, 5, 3, 0.0));
  CHECK_THROWS(simultaneous_intervals(std::vector<long long>{}, 0.1));
}
