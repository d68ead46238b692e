#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bincp {

// Regularized lower incomplete gamma P(a,x): series for x < a+1,
// continued fraction otherwise.
double lower_regularized_gamma(double a, double x);

// CDF of the chi-square distribution with df degrees of freedom.
double chi2_cdf(int df, double x);

// Smallest x with CDF(df,x) = q, |CDF(df,result) - q| <= 1e-10.
double chi2_inverse_cdf(int df, double q);

// Pearson statistic Sum (c_k - t_k)^2 / t_k as an exact fraction over the
// lcm of the targets.  No rounding anywhere; conversion to double happens
// only on demand.
struct RationalStat {
  boost::multiprecision::cpp_int num;
  boost::multiprecision::cpp_int den;  // lcm of the targets, > 0

  bool is_zero() const { return num == 0; }
  double to_double() const;
  bool operator==(const RationalStat& o) const { return num * o.den == o.num * den; }
  // statistic <= threshold + 1e-12
  bool within(double threshold) const;
  std::string to_string() const;  // "num/den"
};

RationalStat pearson_statistic(std::span<const long long> counts,
                               std::span<const long long> targets);

// Confidence interval for one category proportion from the quadratic
//   (N + A) p^2 - (2 N phat + A) p + N phat^2 = 0,
// A the chi-square quantile at 1 - alpha with k-1 degrees of freedom.
std::pair<double, double> qh_interval(long long n_total, long long count, int k, double alpha);

// Intervals for all k categories of one sample of size n_total.
std::vector<std::pair<double, double>> simultaneous_intervals(std::span<const long long> counts,
                                                              double alpha);

}  // namespace bincp
