#include "bincp/stats.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bincp {

namespace {

// Series expansion, valid for x < a+1.
double gamma_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a,x), valid for x >= a+1.
double gamma_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double lower_regularized_gamma(double a, double x) {
  if (a <= 0) throw std::invalid_argument("gamma: a must be positive");
  if (x < 0) throw std::invalid_argument("gamma: x must be nonnegative");
  if (x == 0) return 0.0;
  return x < a + 1.0 ? gamma_series(a, x) : 1.0 - gamma_cf(a, x);
}

double chi2_cdf(int df, double x) {
  if (df < 1) throw std::invalid_argument("chi2_cdf: df must be >= 1");
  if (x <= 0) return 0.0;
  return lower_regularized_gamma(0.5 * df, 0.5 * x);
}

namespace {

double chi2_pdf(int df, double x) {
  if (x <= 0) return 0.0;
  double a = 0.5 * df;
  return std::exp((a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) - std::lgamma(a));
}

}  // namespace

double chi2_inverse_cdf(int df, double q) {
  if (df < 1) throw std::invalid_argument("chi2_inverse_cdf: df must be >= 1");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("chi2_inverse_cdf: q must be in (0,1)");
  // Bracket around the Wilson-Hilferty median approximation, grown
  // geometrically until the quantile is enclosed.
  double med = df * std::pow(1.0 - 2.0 / (9.0 * df), 3.0);
  double lo = 0.0, hi = std::max(med, 1.0);
  while (chi2_cdf(df, hi) < q) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("chi2_inverse_cdf: bracket overflow");
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (chi2_cdf(df, mid) < q)
      lo = mid;
    else
      hi = mid;
  }
  double x = 0.5 * (lo + hi);
  // Newton polish.
  for (int i = 0; i < 4; ++i) {
    double f = chi2_cdf(df, x) - q;
    double d = chi2_pdf(df, x);
    if (d <= 0) break;
    double step = f / d;
    double nx = x - step;
    if (nx <= 0) break;
    x = nx;
    if (std::fabs(step) < 1e-14 * (1.0 + x)) break;
  }
  return x;
}

double RationalStat::to_double() const {
  return num.convert_to<double>() / den.convert_to<double>();
}

bool RationalStat::within(double threshold) const {
  return to_double() <= threshold + 1e-12;
}

std::string RationalStat::to_string() const {
  return num.str() + "/" + den.str();
}

RationalStat pearson_statistic(std::span<const long long> counts,
                               std::span<const long long> targets) {
  if (counts.size() != targets.size())
    throw std::invalid_argument("pearson_statistic: size mismatch");
  boost::multiprecision::cpp_int l = 1;
  for (long long t : targets) {
    if (t <= 0) throw std::invalid_argument("pearson_statistic: targets must be positive");
    l = boost::multiprecision::lcm(l, boost::multiprecision::cpp_int(t));
  }
  boost::multiprecision::cpp_int num = 0;
  for (size_t k = 0; k < counts.size(); ++k) {
    boost::multiprecision::cpp_int d = counts[k] - targets[k];
    num += d * d * (l / targets[k]);
  }
  return {num, l};
}

std::pair<double, double> qh_interval(long long n_total, long long count, int k, double alpha) {
  if (n_total <= 0) throw std::invalid_argument("qh_interval: sample size must be positive");
  if (count < 0 || count > n_total) throw std::invalid_argument("qh_interval: bad count");
  if (k < 2) throw std::invalid_argument("qh_interval: need at least two categories");
  double A = chi2_inverse_cdf(k - 1, 1.0 - alpha);
  double N = (double)n_total;
  double phat = (double)count / N;
  double a = N + A;
  double b = -(2.0 * N * phat + A);
  double c = N * phat * phat;
  double disc = b * b - 4.0 * a * c;
  if (disc < 0) {
    if (disc < -1e-9 * std::max(1.0, b * b))
      throw std::runtime_error("qh_interval: negative discriminant");
    disc = 0.0;
  }
  // b < 0 always, so this split avoids cancellation.
  double qq = 0.5 * (-b + std::sqrt(disc));
  double hi = qq / a;
  double lo = c / qq;
  if (lo > hi) std::swap(lo, hi);
  lo = std::max(0.0, lo);
  hi = std::min(1.0, hi);
  return {lo, hi};
}

std::vector<std::pair<double, double>> simultaneous_intervals(std::span<const long long> counts,
                                                              double alpha) {
  if (counts.size() < 2)
    throw std::invalid_argument("simultaneous_intervals: need at least two categories");
  long long n = std::accumulate(counts.begin(), counts.end(), 0LL);
  std::vector<std::pair<double, double>> out;
  for (long long c : counts) out.push_back(qh_interval(n, c, (int)counts.size(), alpha));
  return out;
}

}  // namespace bincp
