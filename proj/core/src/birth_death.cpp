#include "bdinf/birth_death.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bdinf/error.hpp"
#include "bdinf/parallel.hpp"

namespace bdinf::model {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool nearly_equal(double lambda, double mu) noexcept {
  return std::abs(lambda - mu) < kEqualRateTolerance * std::max(lambda, mu);
}

void require_finite_time(double t) {
  if (!std::isfinite(t)) fail(ErrorKind::invalid_input, "time must be finite, got " + std::to_string(t));
}

double logistic(double m) {
  return m >= 0 ? 1.0 / (1.0 + std::exp(-m)) : std::exp(m) / (1.0 + std::exp(m));
}

}  // namespace

void BirthDeathParams::validate() const {
  require(std::isfinite(lambda) && lambda > 0.0, "birth rate must be finite and positive");
  require(std::isfinite(mu) && mu > 0.0, "death rate must be finite and positive");
  require(x0 >= 1, "initial population must be at least 1");
}

bool rates_nearly_equal(const BirthDeathParams& params) noexcept {
  return nearly_equal(params.lambda, params.mu);
}

// q(t) = mu(1 - F) / (mu - lambda F) when mu > lambda, mu(1 - F) / (lambda - mu F)
// otherwise, with F = exp(-|mu - lambda| t). Both forms avoid exp of a positive argument.
double lineage_extinction_prob(double lambda, double mu, double t) {
  if (t <= 0.0) return 0.0;
  if (std::isinf(t)) return lambda <= mu ? 1.0 : mu / lambda;
  if (nearly_equal(lambda, mu)) {
    const double lt = lambda * t;
    return lt / (1.0 + lt);
  }
  const double rate = std::abs(mu - lambda);
  const double f = std::exp(-rate * t);
  const double one_minus_f = -std::expm1(-rate * t);
  const double q = mu > lambda ? mu * one_minus_f / (mu - lambda * f) : mu * one_minus_f / (lambda - mu * f);
  return std::clamp(q, 0.0, 1.0);
}

double lineage_extinction_quantile(double lambda, double mu, double u) {
  if (u <= 0.0) return 0.0;
  if (nearly_equal(lambda, mu)) {
    if (u >= 1.0) return kInf;
    return u / (lambda * (1.0 - u));
  }
  const double limit = lambda <= mu ? 1.0 : mu / lambda;
  if (u >= limit) return kInf;
  const double rate = std::abs(mu - lambda);
  double log_f;
  if (mu > lambda) {
    log_f = std::log(mu) + std::log1p(-u) - std::log(mu - u * lambda);
  } else {
    log_f = std::log(mu - u * lambda) - std::log(mu) - std::log1p(-u);
  }
  return std::max(0.0, -log_f / rate);
}

double extinction_prob(const BirthDeathParams& params, double t) {
  params.validate();
  require_finite_time(t);
  require(t >= 0.0, "extinction_prob needs t >= 0");
  const double q = lineage_extinction_prob(params.lambda, params.mu, t);
  if (q <= 0.0) return 0.0;
  return std::exp(params.x0 * std::log(q));
}

LogExtinctionDensity::LogExtinctionDensity(const BirthDeathParams& params)
    : lambda_(params.lambda),
      mu_(params.mu),
      rate_(std::abs(params.mu - params.lambda)),
      x0_minus_one_(params.x0 - 1),
      equal_rates_(nearly_equal(params.lambda, params.mu)) {
  params.validate();
  const double log_x0 = std::log(static_cast<double>(params.x0));
  constant_ = equal_rates_ ? log_x0 + std::log(lambda_) : log_x0 + std::log(mu_) + 2.0 * std::log(rate_);
}

double LogExtinctionDensity::operator()(double t) const noexcept {
  const double q = lineage_extinction_prob(lambda_, mu_, t);
  const double prefactor = constant_ + x0_minus_one_ * std::log(q);
  if (equal_rates_) return prefactor - 2.0 * std::log1p(lambda_ * t);
  // q'(t) = mu r^2 F / den^2
  const double f = std::exp(-rate_ * t);
  const double den = mu_ > lambda_ ? mu_ - lambda_ * f : lambda_ - mu_ * f;
  return prefactor - rate_ * t - 2.0 * std::log(den);
}

double log_extinction_density(const BirthDeathParams& params, double t) {
  require_finite_time(t);
  require(t > 0.0, "extinction density is defined for t > 0");
  return LogExtinctionDensity(params)(t);
}

double extinction_density(const BirthDeathParams& params, double t) {
  return std::exp(log_extinction_density(params, t));
}

double ultimate_extinction_prob(const BirthDeathParams& params) {
  params.validate();
  if (params.mu >= params.lambda || rates_nearly_equal(params)) return 1.0;
  return std::exp(params.x0 * std::log(params.mu / params.lambda));
}

std::optional<double> simulate_death_time(const BirthDeathParams& params, double horizon, Rng& rng,
                                          const SimulatorOptions& options) {
  require(std::isfinite(params.lambda) && params.lambda >= 0.0, "birth rate must be finite and >= 0");
  require(std::isfinite(params.mu) && params.mu > 0.0, "death rate must be finite and positive");
  require(params.x0 >= 1, "initial population must be at least 1");
  require(horizon >= 0.0, "horizon must be non-negative");

  const double total_rate = params.lambda + params.mu;
  const double birth_prob = params.lambda / total_rate;
  std::int64_t x = params.x0;
  double t = 0.0;
  std::exponential_distribution<double> unit_exp(1.0);
  for (;;) {
    if (x > options.direct_sampling_threshold && params.lambda > 0.0) {
      // Remaining extinction time S from population x satisfies P(S <= s) = q(s)^x.
      const double u = std::exp(std::log(uniform01(rng)) / static_cast<double>(x));
      const double s = lineage_extinction_quantile(params.lambda, params.mu, u);
      if (t + s > horizon) return std::nullopt;
      return t + s;
    }
    t += unit_exp(rng) / (total_rate * static_cast<double>(x));
    if (t > horizon) return std::nullopt;
    if (uniform01(rng) < birth_prob) {
      ++x;
    } else if (--x == 0) {
      return t;
    }
  }
}

std::vector<std::optional<double>> simulate_cohort(const BirthDeathParams& params, int n, double horizon,
                                                   std::uint64_t seed, int workers,
                                                   const SimulatorOptions& options) {
  require(n >= 1, "cohort size must be at least 1");
  std::vector<std::optional<double>> out(static_cast<std::size_t>(n));
  const std::size_t blocks = (out.size() + kCohortBlock - 1) / kCohortBlock;
  parallel_for(blocks, workers, [&](std::size_t b) {
    Rng rng = make_stream(seed, b);
    const std::size_t end = std::min(out.size(), (b + 1) * kCohortBlock);
    for (std::size_t i = b * kCohortBlock; i < end; ++i) {
      out[i] = simulate_death_time(params, horizon, rng, options);
    }
  });
  return out;
}

namespace {

void require_grid(std::span<const double> times) {
  require(!times.empty(), "time grid must not be empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(std::isfinite(times[i]) && times[i] >= 0.0, "grid times must be finite and non-negative");
    if (i > 0) require(times[i] > times[i - 1], "grid times must be strictly increasing");
  }
}

}  // namespace

std::vector<ProportionEstimate> proportions_from_death_times(std::span<const std::optional<double>> death_times,
                                                             std::span<const double> times) {
  require_grid(times);
  require(!death_times.empty(), "need at least one cell");
  std::vector<double> sorted;
  sorted.reserve(death_times.size());
  for (const auto& d : death_times) {
    if (d) sorted.push_back(*d);
  }
  std::sort(sorted.begin(), sorted.end());
  const int n = static_cast<int>(death_times.size());
  std::vector<ProportionEstimate> out;
  out.reserve(times.size());
  for (double t : times) {
    const auto dead = static_cast<int>(std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
    const double p = static_cast<double>(dead) / n;
    out.push_back({t, n, dead, p, elogit(p, n)});
  }
  return out;
}

std::vector<ProportionEstimate> estimate_proportions(const BirthDeathParams& params, int n,
                                                     std::span<const double> times, Rng& rng,
                                                     const SimulatorOptions& options) {
  require(n >= 1, "replicate count must be at least 1");
  require_grid(times);
  std::vector<std::optional<double>> deaths(static_cast<std::size_t>(n));
  for (auto& d : deaths) d = simulate_death_time(params, times.back(), rng, options);
  return proportions_from_death_times(deaths, times);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

double elogit(double p_hat, int n) {
  const double half = 0.5 / n;
  return std::log(p_hat + half) - std::log(1.0 - p_hat + half);
}

double eexpit_raw(double m, int n) {
  const double half = 0.5 / n;
  return logistic(m) * (1.0 + half) - half * logistic(-m);
}

double eexpit(double m, int n) { return std::clamp(eexpit_raw(m, n), 0.0, 1.0); }

double elogit_variance(double p, int n) {
  const double half = 0.5 / n;
  const double q = std::clamp(p, half, 1.0 - half);
  return 1.0 / (n * q * (1.0 - q));
}

}  // namespace bdinf::model
