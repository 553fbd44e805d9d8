#include "bdinf/observation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bdinf/error.hpp"

namespace bdinf::obs {

TimeGrid TimeGrid::uniform(int bins, double lo, double hi) {
  require(bins >= 1, "grid needs at least one bin");
  require(hi > lo && lo >= 0.0, "grid needs 0 <= lo < hi");
  TimeGrid grid;
  grid.census_times.reserve(static_cast<std::size_t>(bins));
  for (int i = 1; i <= bins; ++i) grid.census_times.push_back(lo + (hi - lo) * i / bins);
  return grid;
}

void TimeGrid::validate() const {
  require(!census_times.empty(), "time grid needs at least one census time");
  require(std::isfinite(census_times.front()) && census_times.front() > 0.0, "first census time must be positive");
  for (std::size_t i = 1; i < census_times.size(); ++i) {
    require(std::isfinite(census_times[i]) && census_times[i] > census_times[i - 1],
            "census times must be finite and strictly increasing");
  }
}

void ExactDeathTimes::validate() const {
  require(!times.empty(), "need at least one death time");
  for (double t : times) require(std::isfinite(t) && t > 0.0, "death times must be finite and positive");
}

int CensusCounts::total() const noexcept { return std::accumulate(counts.begin(), counts.end(), 0); }

void CensusCounts::validate() const {
  grid.validate();
  require(counts.size() == grid.size() + 1, "census counts need B + 1 entries");
  for (int c : counts) require(c >= 0, "census counts must be non-negative");
}

void ProportionObservations::validate() const {
  grid.validate();
  require(y.size() == grid.size(), "need one observation per census time");
  for (double v : y) require(std::isfinite(v), "observations must be finite");
}

ExactDeathTimes generate_exact_times(const model::BirthDeathParams& params, int m, double horizon, Rng& rng) {
  params.validate();
  require(m >= 1, "need m >= 1 death times");
  require(horizon > 0.0, "horizon must be positive");
  ExactDeathTimes out;
  out.times.reserve(static_cast<std::size_t>(m));
  const long max_attempts = static_cast<long>(kMaxAttemptFactor) * m;
  long attempts = 0;
  long censored = 0;
  while (static_cast<int>(out.times.size()) < m && attempts < max_attempts) {
    ++attempts;
    if (auto t = model::simulate_death_time(params, horizon, rng)) {
      out.times.push_back(*t);
    } else {
      ++censored;
    }
  }
  if (static_cast<int>(out.times.size()) < m || 2 * censored > attempts) {
    fail(ErrorKind::survival_rate_too_high,
         std::to_string(censored) + " of " + std::to_string(attempts) + " simulated cells survived past horizon " +
             std::to_string(horizon) + "; death-time data needs extinction to be likely (mu > lambda)");
  }
  return out;
}

CensusCounts bin_death_times(const ExactDeathTimes& times, const TimeGrid& grid) {
  grid.validate();
  CensusCounts out;
  out.grid = grid;
  out.counts.assign(grid.size() + 1, 0);
  const auto& edges = grid.census_times;
  for (double t : times.times) {
    // first edge >= t gives the bin (t_{i-1}, t_i]
    const auto bin = static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), t) - edges.begin());
    ++out.counts[bin];
  }
  return out;
}

ProportionObservations generate_proportion_data(const model::BirthDeathParams& params, const TimeGrid& grid,
                                                double sigma, Rng& rng) {
  params.validate();
  grid.validate();
  require(std::isfinite(sigma) && sigma > 0.0, "noise sd must be positive");
  ProportionObservations out;
  out.grid = grid;
  out.sigma_true = sigma;
  out.y.reserve(grid.size());
  for (double t : grid.census_times) {
    const double p = model::extinction_prob(params, t);
    if (p <= 0.0 || p >= 1.0) {
      fail(ErrorKind::degenerate_logit, "true dead proportion at t=" + std::to_string(t) + " is " +
                                            std::to_string(p) + "; cannot take its logit");
    }
    out.y.push_back(model::logit(p) + sigma * standard_normal(rng));
  }
  return out;
}

}  // namespace bdinf::obs
