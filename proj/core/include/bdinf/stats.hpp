#pragma once

#include <span>
#include <utility>

namespace bdinf::stats {

inline constexpr double kLogTwoPi = 1.8378770664093454836;

double normal_cdf(double z);
double normal_quantile(double p);
double normal_log_pdf(double x, double mean, double variance);

double chi_squared_quantile(double p, double df);
/// Central interval holding `mass` of a chi-squared distribution.
std::pair<double, double> chi_squared_interval(double df, double mass = 0.95);

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator).
double stddev(std::span<const double> xs);
/// Linear-interpolation quantile of an unsorted sample.
double quantile(std::span<const double> xs, double p);

}  // namespace bdinf::stats
