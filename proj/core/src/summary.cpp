#include "bdinf/summary.hpp"

#include <algorithm>
#include <cmath>

#include "bdinf/error.hpp"
#include "bdinf/stats.hpp"

namespace bdinf::summary {

std::vector<ParameterSummary> summarize(const mcmc::Trace& trace) {
  require(trace.rows() >= 2, "trace needs at least two rows to summarize");
  std::vector<ParameterSummary> out;
  for (Eigen::Index k = 0; k < trace.samples.cols(); ++k) {
    const auto col = trace.column(k);
    ParameterSummary s;
    s.name = static_cast<std::size_t>(k) < trace.names.size() ? trace.names[static_cast<std::size_t>(k)]
                                                               : "x" + std::to_string(k);
    s.mean = stats::mean(col);
    s.sd = stats::stddev(col);
    s.q025 = stats::quantile(col, 0.025);
    s.q975 = stats::quantile(col, 0.975);
    out.push_back(std::move(s));
  }
  return out;
}

double pooled_sd(double sd_a, double sd_b) { return std::sqrt(0.5 * (sd_a * sd_a + sd_b * sd_b)); }

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "Wasserstein distance needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  // Integrate |F_a - F_b| over the merged support.
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double prev = std::min(a.front(), b.front());
  double total = 0.0;
  while (i < a.size() || j < b.size()) {
    const double x = (j == b.size() || (i < a.size() && a[i] <= b[j])) ? a[i] : b[j];
    total += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (x - prev);
    prev = x;
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
  }
  return total;
}

std::vector<PairComparison> compare(const std::vector<mcmc::Trace>& traces, const std::vector<std::string>& labels) {
  require(traces.size() >= 2, "comparison needs at least two traces");
  require(labels.size() == traces.size(), "one label per trace is required");

  std::vector<std::string> shared = traces.front().names;
  for (const auto& t : traces) {
    std::erase_if(shared, [&](const std::string& n) {
      return std::find(t.names.begin(), t.names.end(), n) == t.names.end();
    });
  }
  if (shared.empty()) fail(ErrorKind::invalid_input, "traces share no parameters");

  auto column = [](const mcmc::Trace& t, const std::string& name) {
    const auto it = std::find(t.names.begin(), t.names.end(), name);
    return t.column(it - t.names.begin());
  };

  std::vector<PairComparison> out;
  for (const auto& name : shared) {
    for (std::size_t a = 0; a < traces.size(); ++a) {
      for (std::size_t b = a + 1; b < traces.size(); ++b) {
        const auto xa = column(traces[a], name);
        const auto xb = column(traces[b], name);
        PairComparison c;
        c.parameter = name;
        c.label_a = labels[a];
        c.label_b = labels[b];
        c.mean_a = stats::mean(xa);
        c.mean_b = stats::mean(xb);
        c.pooled_sd = pooled_sd(stats::stddev(xa), stats::stddev(xb));
        const double diff = std::abs(c.mean_a - c.mean_b);
        c.standardized_difference = c.pooled_sd > 0.0 ? diff / c.pooled_sd : (diff == 0.0 ? 0.0 : INFINITY);
        c.wasserstein1 = wasserstein1(xa, xb);
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

}  // namespace bdinf::summary
