#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "bdinf/birth_death.hpp"
#include "bdinf/random.hpp"

namespace bdinf::obs {

/// Census times t_1 < ... < t_B, with implicit t_0 = 0 and t_{B+1} = inf.
struct TimeGrid {
  std::vector<double> census_times;

  /// B equal-width bins on (lo, hi]: t_i = lo + i (hi - lo) / B.
  static TimeGrid uniform(int bins, double lo = 1.0, double hi = 11.0);

  std::size_t size() const noexcept { return census_times.size(); }
  void validate() const;
};

struct ExactDeathTimes {
  std::vector<double> times;
  void validate() const;
};

/// counts[i] = deaths in (t_{i-1}, t_i]; the last entry counts deaths after t_B.
struct CensusCounts {
  std::vector<int> counts;
  TimeGrid grid;

  int total() const noexcept;
  void validate() const;
};

/// y_i = logit of the observed dead proportion at t_i.
struct ProportionObservations {
  std::vector<double> y;
  TimeGrid grid;
  std::optional<double> sigma_true;

  void validate() const;
};

using ObservedDataset = std::variant<ExactDeathTimes, CensusCounts, ProportionObservations>;

inline constexpr double kDefaultExactHorizon = 100.0;
/// Censored cells are redrawn until m deaths are seen or this many multiples of m were tried.
inline constexpr int kMaxAttemptFactor = 10;

ExactDeathTimes generate_exact_times(const model::BirthDeathParams& params, int m, double horizon, Rng& rng);

CensusCounts bin_death_times(const ExactDeathTimes& times, const TimeGrid& grid);

ProportionObservations generate_proportion_data(const model::BirthDeathParams& params, const TimeGrid& grid,
                                                double sigma, Rng& rng);

}  // namespace bdinf::obs
