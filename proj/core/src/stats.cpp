#include "bdinf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "bdinf/error.hpp"

namespace bdinf::stats {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "normal quantile needs p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double normal_log_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * (kLogTwoPi + std::log(variance) + d * d / variance);
}

double chi_squared_quantile(double p, double df) {
  require(p > 0.0 && p < 1.0, "chi-squared quantile needs p in (0, 1)");
  require(df > 0.0, "chi-squared degrees of freedom must be positive");
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), p);
}

std::pair<double, double> chi_squared_interval(double df, double mass) {
  const double tail = 0.5 * (1.0 - mass);
  return {chi_squared_quantile(tail, df), chi_squared_quantile(1.0 - tail, df)};
}

double mean(std::span<const double> xs) {
  require(!xs.empty(), "mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
  require(xs.size() >= 2, "standard deviation needs two values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double quantile(std::span<const double> xs, double p) {
  require(!xs.empty(), "quantile of empty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

}  // namespace bdinf::stats
