#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "bdinf/random.hpp"

namespace bdinf::model {

/// Per-capita birth and death rates of a cell's internal population and its
/// initial size. A cell is dead once the population is extinct.
struct BirthDeathParams {
  double lambda = 0.6;
  double mu = 1.0;
  int x0 = 10;

  /// Throws invalid_input unless lambda > 0, mu > 0 and x0 >= 1 (all finite).
  void validate() const;
};

/// |lambda - mu| below this fraction of max(lambda, mu) is treated as lambda == mu.
inline constexpr double kEqualRateTolerance = 1e-8;

bool rates_nearly_equal(const BirthDeathParams& params) noexcept;

/// Probability that the population is extinct by time t.
double extinction_prob(const BirthDeathParams& params, double t);
/// Density of the extinction time at t > 0.
double extinction_density(const BirthDeathParams& params, double t);
double log_extinction_density(const BirthDeathParams& params, double t);
/// log_extinction_density with the per-parameter constants computed once;
/// t must be finite and positive (not checked).
class LogExtinctionDensity {
 public:
  explicit LogExtinctionDensity(const BirthDeathParams& params);
  double operator()(double t) const noexcept;

 private:
  double lambda_;
  double mu_;
  double rate_;
  double x0_minus_one_;
  double constant_;
  bool equal_rates_;
};

/// min{1, (mu/lambda)^x0}.
double ultimate_extinction_prob(const BirthDeathParams& params);

/// Single-lineage extinction probability q(t), so that extinction_prob = q(t)^x0.
double lineage_extinction_prob(double lambda, double mu, double t);
/// Inverse of q on [0, min(1, mu/lambda)); returns +inf when u is at or beyond the limit.
double lineage_extinction_quantile(double lambda, double mu, double u);

struct SimulatorOptions {
  /// Above this population the remaining extinction time is drawn from the
  /// branching-property law q(s)^x instead of stepping every event. Exact in
  /// distribution; keeps runaway (lambda > mu) paths cheap.
  std::int64_t direct_sampling_threshold = 500;
};

/// Exact-event simulation of one cell. Returns the death time, or nullopt if
/// the population is still alive at `horizon`. Accepts lambda == 0 (pure death).
std::optional<double> simulate_death_time(const BirthDeathParams& params, double horizon, Rng& rng,
                                          const SimulatorOptions& options = {});

/// Death times of n independent cells. Cells are simulated in fixed blocks of
/// kCohortBlock; block b draws from make_stream(seed, b), so the cohort is the
/// same for any worker count.
inline constexpr std::size_t kCohortBlock = 256;
std::vector<std::optional<double>> simulate_cohort(const BirthDeathParams& params, int n, double horizon,
                                                   std::uint64_t seed, int workers = 1,
                                                   const SimulatorOptions& options = {});

struct ProportionEstimate {
  double t = 0.0;
  int n = 0;
  int dead = 0;
  double p_hat = 0.0;
  double x = 0.0;  // elogit(p_hat, n)
};

/// Thresholds one cohort of death times at every grid time.
std::vector<ProportionEstimate> proportions_from_death_times(std::span<const std::optional<double>> death_times,
                                                             std::span<const double> times);

/// Simulates n cells once (horizon = last grid time) and reports the dead
/// fraction at every grid time.
std::vector<ProportionEstimate> estimate_proportions(const BirthDeathParams& params, int n,
                                                     std::span<const double> times, Rng& rng,
                                                     const SimulatorOptions& options = {});

double logit(double p);
/// log{(p + 0.5/n) / (1 - p + 0.5/n)}; finite for p in [0, 1].
double elogit(double p_hat, int n);
/// Inverse of elogit for fixed n, clamped to [0, 1].
double eexpit(double m, int n);
/// Unclamped inverse, in [-0.5/n, 1 + 0.5/n].
double eexpit_raw(double m, int n);

/// 1 / {n p(1-p)} with p clamped to [0.5/n, 1 - 0.5/n]: the large-n variance of
/// the empirical logit.
double elogit_variance(double p, int n);

}  // namespace bdinf::model
