#pragma once

#include <string>
#include <vector>

#include "bdinf/mcmc.hpp"

namespace bdinf::summary {

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;

  bool covers(double value) const noexcept { return value >= q025 && value <= q975; }
};

std::vector<ParameterSummary> summarize(const mcmc::Trace& trace);

struct PairComparison {
  std::string parameter;
  std::string label_a;
  std::string label_b;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double pooled_sd = 0.0;
  double standardized_difference = 0.0;  // |mean_a - mean_b| / pooled_sd
  double wasserstein1 = 0.0;             // between the two marginal samples
};

/// sqrt((sd_a^2 + sd_b^2) / 2).
double pooled_sd(double sd_a, double sd_b);

/// 1-Wasserstein distance between two empirical distributions.
double wasserstein1(std::vector<double> a, std::vector<double> b);

/// All pairwise comparisons over the parameters shared by every trace. Traces
/// must agree on their common parameter names' meaning (log scale); a trace
/// missing a parameter another one has is allowed, but no shared column is an error.
std::vector<PairComparison> compare(const std::vector<mcmc::Trace>& traces, const std::vector<std::string>& labels);

}  // namespace bdinf::summary
