#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bdinf/birth_death.hpp"
#include "bdinf/emulator.hpp"
#include "bdinf/observation.hpp"
#include "bdinf/random.hpp"

namespace bdinf::mcmc {

/// LN(location, scale_var): log X ~ N(location, scale_var). scale_var is a variance.
struct LogNormalPrior {
  double location = 0.0;
  double scale_var = 1.0;

  void validate() const;
  /// Density of X on the original scale.
  double log_density(double x) const;
  /// Density of log X, i.e. log_density(e^v) + v.
  double log_density_of_log(double v) const;
};

struct Priors {
  LogNormalPrior lambda{-0.5108256237659907, 2.0};  // LN(log 0.6, 2)
  LogNormalPrior mu{0.0, 2.0};                      // LN(0, 2)
  LogNormalPrior sigma{-0.6931471805599453, 0.5};   // LN(log 0.5, 0.5)
};

struct McmcConfig {
  int iterations = 200000;  // total, including burn-in
  int burnin = 1000;
  int thin = 200;
  std::vector<double> step_sd;  // one per coordinate; empty means 0.08 each
  std::uint64_t seed = 1;

  void validate(std::size_t dim) const;
  /// Kept rows: floor((iterations - burnin) / thin).
  int kept_rows() const noexcept { return (iterations - burnin) / thin; }
};

inline constexpr double kDefaultStepSd = 0.08;

/// Random-walk proposals on some coordinates may be reflected into [lo, hi]
/// instead of left free; the reflected normal kernel is still symmetric.
using ReflectingBounds = std::vector<std::optional<std::pair<double, double>>>;

struct Trace {
  std::vector<std::string> names;
  std::vector<int> iteration;
  Eigen::MatrixXd samples;  // one row per kept iteration
  double acceptance_rate = 0.0;
  McmcConfig config;

  Eigen::Index rows() const noexcept { return samples.rows(); }
  std::vector<double> column(Eigen::Index k) const;
};

using LogTarget = std::function<double(std::span<const double>)>;

/// Joint symmetric normal random-walk Metropolis-Hastings. The current
/// state's target value is cached and never re-evaluated, so noisy targets
/// compare a fresh proposal value against the stored current value.
Trace mh_sample(const LogTarget& log_target, std::vector<double> init, const McmcConfig& config, Rng& rng,
                std::vector<std::string> names = {}, const ReflectingBounds& reflect = {});

/// Acceptance probability of (lambda, mu) -> (lambda*, mu*) computed on the
/// original scale: prior ratio x likelihood ratio x lambda* mu* / (lambda mu).
double original_scale_acceptance(double log_prior_ratio, double log_lik_ratio,
                                 std::span<const double> current, std::span<const double> proposed);

// ---- log-likelihoods -------------------------------------------------------

double loglik_exact_times(const obs::ExactDeathTimes& data, const model::BirthDeathParams& params);
double loglik_census(const obs::CensusCounts& data, const model::BirthDeathParams& params);
double loglik_proportions_exact(const obs::ProportionObservations& data, const model::BirthDeathParams& params,
                                double sigma);

struct SimulatedLikelihoodOptions {
  int replicates = 1000;
  int workers = 1;
  model::SimulatorOptions simulator;
};

/// One fresh cohort of n cells (seeded from one draw of rng), elogit p_hat at each census time.
double loglik_proportions_simulated(const obs::ProportionObservations& data, const model::BirthDeathParams& params,
                                    double sigma, const SimulatedLikelihoodOptions& options, Rng& rng);
/// As above with variance sigma^2 + elogit_variance(p_hat, n).
double loglik_proportions_inflated(const obs::ProportionObservations& data, const model::BirthDeathParams& params,
                                   double sigma, const SimulatedLikelihoodOptions& options, Rng& rng);
/// Sum of log N(y_i | m*_i, v*_i + sigma^2) over per-time emulators.
double loglik_proportions_emulated(const obs::ProportionObservations& data, const Theta& theta, double sigma,
                                   std::span<const gp::EmulatorPtr> emulators);

// ---- posterior assembly ----------------------------------------------------

enum class Scenario { exact_times, census, proportions_exact, proportions_simulated, proportions_inflated,
                      proportions_emulated };

/// "a", "b", "c-exact", "c-sim", "c-inflated", "c-emulated".
std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);
bool has_sigma(Scenario s) noexcept;

struct PosteriorRequest {
  Scenario scenario = Scenario::exact_times;
  obs::ObservedDataset data;
  Priors priors;
  McmcConfig config;
  int x0 = 10;
  SimulatedLikelihoodOptions simulation;
  std::vector<gp::EmulatorPtr> emulators;
  /// Initial log-parameters; defaults to the prior locations.
  std::vector<double> init;
};

/// Log posterior on the log-parameter scale (Jacobian included) for the
/// deterministic scenarios; stochastic scenarios draw from rng.
LogTarget make_log_target(const PosteriorRequest& request, Rng& rng);

Trace run_posterior(const PosteriorRequest& request, Rng& rng);

}  // namespace bdinf::mcmc
