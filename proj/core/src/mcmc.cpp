#include "bdinf/mcmc.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bdinf/error.hpp"
#include "bdinf/stats.hpp"

namespace bdinf::mcmc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double reflect_into(double x, double lo, double hi) {
  const double width = hi - lo;
  double y = std::fmod(x - lo, 2.0 * width);
  if (y < 0.0) y += 2.0 * width;
  return lo + (y <= width ? y : 2.0 * width - y);
}

std::string format_state(std::span<const double> state) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < state.size(); ++i) os << (i ? ", " : "") << state[i];
  os << ')';
  return os.str();
}

}  // namespace

void LogNormalPrior::validate() const {
  require(std::isfinite(location), "log-normal location must be finite");
  require(std::isfinite(scale_var) && scale_var > 0.0, "log-normal scale variance must be positive");
}

double LogNormalPrior::log_density(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) return kNegInf;
  const double v = std::log(x);
  return stats::normal_log_pdf(v, location, scale_var) - v;
}

double LogNormalPrior::log_density_of_log(double v) const {
  if (!std::isfinite(v)) return kNegInf;
  return stats::normal_log_pdf(v, location, scale_var);
}

void McmcConfig::validate(std::size_t dim) const {
  require(iterations >= 1 && burnin >= 0 && thin >= 1, "MCMC iterations and thin must be positive, burn-in >= 0");
  require(burnin < iterations, "burn-in must be shorter than the run");
  require(step_sd.empty() || step_sd.size() == dim, "need one proposal sd per parameter");
  for (double s : step_sd) require(std::isfinite(s) && s > 0.0, "proposal sds must be positive");
}

std::vector<double> Trace::column(Eigen::Index k) const {
  std::vector<double> out(static_cast<std::size_t>(samples.rows()));
  for (Eigen::Index i = 0; i < samples.rows(); ++i) out[static_cast<std::size_t>(i)] = samples(i, k);
  return out;
}

Trace mh_sample(const LogTarget& log_target, std::vector<double> init, const McmcConfig& config, Rng& rng,
                std::vector<std::string> names, const ReflectingBounds& reflect) {
  const std::size_t dim = init.size();
  require(dim >= 1, "MCMC needs at least one parameter");
  config.validate(dim);
  require(reflect.empty() || reflect.size() == dim, "reflection bounds must match the parameter count");
  if (names.empty()) {
    for (std::size_t k = 0; k < dim; ++k) names.push_back("x" + std::to_string(k));
  }
  require(names.size() == dim, "need one name per parameter");
  std::vector<double> step = config.step_sd.empty() ? std::vector<double>(dim, kDefaultStepSd) : config.step_sd;

  std::vector<double> current = std::move(init);
  double current_lp = log_target(current);
  if (!std::isfinite(current_lp)) {
    fail(ErrorKind::mcmc_failure, "log target is not finite at the initial state " + format_state(current));
  }

  Trace trace;
  trace.names = std::move(names);
  trace.config = config;
  trace.samples.resize(config.kept_rows(), static_cast<Eigen::Index>(dim));
  trace.iteration.reserve(static_cast<std::size_t>(config.kept_rows()));

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> proposal(dim);
  long accepted = 0;
  Eigen::Index row = 0;
  for (int it = 1; it <= config.iterations; ++it) {
    for (std::size_t k = 0; k < dim; ++k) {
      proposal[k] = current[k] + step[k] * normal(rng);
      if (!reflect.empty() && reflect[k]) proposal[k] = reflect_into(proposal[k], reflect[k]->first, reflect[k]->second);
    }
    const double lp = log_target(proposal);
    if (std::isnan(lp)) {
      fail(ErrorKind::mcmc_failure, "log target returned NaN at iteration " + std::to_string(it) + ", proposal " +
                                        format_state(proposal) + ", current " + format_state(current) +
                                        " (log target " + std::to_string(current_lp) + ")");
    }
    const double log_u = std::log(uniform01(rng));
    if (lp > kNegInf && log_u < lp - current_lp) {
      current.swap(proposal);
      current_lp = lp;
      ++accepted;
    }
    if (it > config.burnin && (it - config.burnin) % config.thin == 0 && row < trace.samples.rows()) {
      for (std::size_t k = 0; k < dim; ++k) trace.samples(row, static_cast<Eigen::Index>(k)) = current[k];
      trace.iteration.push_back(it);
      ++row;
    }
  }
  trace.acceptance_rate = static_cast<double>(accepted) / config.iterations;
  return trace;
}

double original_scale_acceptance(double log_prior_ratio, double log_lik_ratio, std::span<const double> current,
                                 std::span<const double> proposed) {
  require(current.size() == proposed.size(), "state sizes differ");
  double log_a = log_prior_ratio + log_lik_ratio;
  for (std::size_t k = 0; k < current.size(); ++k) log_a += std::log(proposed[k]) - std::log(current[k]);
  return log_a >= 0.0 ? 1.0 : std::exp(log_a);
}

double loglik_exact_times(const obs::ExactDeathTimes& data, const model::BirthDeathParams& params) {
  const model::LogExtinctionDensity log_density(params);
  double ll = 0.0;
  for (double t : data.times) {
    require(std::isfinite(t) && t > 0.0, "death times must be finite and positive");
    const double term = log_density(t);
    if (!(term > kNegInf)) return kNegInf;
    ll += term;
  }
  return ll;
}

double loglik_census(const obs::CensusCounts& data, const model::BirthDeathParams& params) {
  params.validate();
  data.validate();
  const auto& times = data.grid.census_times;
  double previous = 0.0;
  double ll = 0.0;
  for (std::size_t i = 0; i < data.counts.size(); ++i) {
    const double current = i < times.size() ? model::extinction_prob(params, times[i])
                                            : model::ultimate_extinction_prob(params);
    const int n_i = data.counts[i];
    if (n_i > 0) {
      const double mass = current - previous;
      if (!(mass > 0.0)) return kNegInf;
      ll += n_i * std::log(mass);
    }
    previous = current;
  }
  return ll;
}

double loglik_proportions_exact(const obs::ProportionObservations& data, const model::BirthDeathParams& params,
                                double sigma) {
  params.validate();
  require(sigma > 0.0, "sigma must be positive");
  const double variance = sigma * sigma;
  double ll = 0.0;
  for (std::size_t i = 0; i < data.y.size(); ++i) {
    const double p = model::extinction_prob(params, data.grid.census_times[i]);
    if (!(p > 0.0 && p < 1.0)) return kNegInf;
    ll += stats::normal_log_pdf(data.y[i], model::logit(p), variance);
  }
  return ll;
}

namespace {

std::vector<model::ProportionEstimate> simulate_grid(const obs::ProportionObservations& data,
                                                     const model::BirthDeathParams& params,
                                                     const SimulatedLikelihoodOptions& options, Rng& rng) {
  params.validate();
  require(options.replicates >= 1, "replicate count must be at least 1");
  const auto& times = data.grid.census_times;
  const std::uint64_t seed = rng();
  const auto cohort =
      model::simulate_cohort(params, options.replicates, times.back(), seed, options.workers, options.simulator);
  return model::proportions_from_death_times(cohort, times);
}

}  // namespace

double loglik_proportions_simulated(const obs::ProportionObservations& data, const model::BirthDeathParams& params,
                                    double sigma, const SimulatedLikelihoodOptions& options, Rng& rng) {
  require(sigma > 0.0, "sigma must be positive");
  const auto props = simulate_grid(data, params, options, rng);
  const double variance = sigma * sigma;
  double ll = 0.0;
  for (std::size_t i = 0; i < data.y.size(); ++i) ll += stats::normal_log_pdf(data.y[i], props[i].x, variance);
  return ll;
}

double loglik_proportions_inflated(const obs::ProportionObservations& data, const model::BirthDeathParams& params,
                                   double sigma, const SimulatedLikelihoodOptions& options, Rng& rng) {
  require(sigma > 0.0, "sigma must be positive");
  const auto props = simulate_grid(data, params, options, rng);
  double ll = 0.0;
  for (std::size_t i = 0; i < data.y.size(); ++i) {
    const double variance = sigma * sigma + model::elogit_variance(props[i].p_hat, props[i].n);
    ll += stats::normal_log_pdf(data.y[i], props[i].x, variance);
  }
  return ll;
}

double loglik_proportions_emulated(const obs::ProportionObservations& data, const Theta& theta, double sigma,
                                   std::span<const gp::EmulatorPtr> emulators) {
  require(sigma > 0.0, "sigma must be positive");
  require(emulators.size() == data.y.size(), "need one emulator per census time");
  const double variance = sigma * sigma;
  double ll = 0.0;
  for (std::size_t i = 0; i < data.y.size(); ++i) {
    const auto pred = emulators[i]->predict(theta);
    ll += stats::normal_log_pdf(data.y[i], pred.mean, pred.variance + variance);
  }
  return ll;
}

}  // namespace bdinf::mcmc
