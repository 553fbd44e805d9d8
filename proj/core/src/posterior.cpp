#include <cmath>
#include <limits>

#include "bdinf/error.hpp"
#include "bdinf/mcmc.hpp"

namespace bdinf::mcmc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTimeMatchTolerance = 1e-9;

template <typename T>
const T& expect_data(const PosteriorRequest& request) {
  const T* data = std::get_if<T>(&request.data);
  if (data == nullptr) {
    fail(ErrorKind::invalid_input, "dataset does not match scenario " + to_string(request.scenario));
  }
  return *data;
}

void check_emulators(const PosteriorRequest& request) {
  const bool emulated = request.scenario == Scenario::proportions_emulated;
  require(emulated == !request.emulators.empty(), "emulators must be supplied exactly for the c-emulated scenario");
  if (!emulated) return;
  const auto& data = expect_data<obs::ProportionObservations>(request);
  require(request.emulators.size() == data.grid.size(), "need one emulator per census time");
  for (std::size_t i = 0; i < request.emulators.size(); ++i) {
    require(request.emulators[i] != nullptr, "missing emulator");
    require(std::abs(request.emulators[i]->time() - data.grid.census_times[i]) < kTimeMatchTolerance,
            "emulator " + std::to_string(i) + " is for t=" + std::to_string(request.emulators[i]->time()) +
                " but the census time is " + std::to_string(data.grid.census_times[i]));
  }
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::exact_times: return "a";
    case Scenario::census: return "b";
    case Scenario::proportions_exact: return "c-exact";
    case Scenario::proportions_simulated: return "c-sim";
    case Scenario::proportions_inflated: return "c-inflated";
    case Scenario::proportions_emulated: return "c-emulated";
  }
  return "?";
}

Scenario scenario_from_string(const std::string& s) {
  for (auto sc : {Scenario::exact_times, Scenario::census, Scenario::proportions_exact,
                  Scenario::proportions_simulated, Scenario::proportions_inflated, Scenario::proportions_emulated}) {
    if (to_string(sc) == s) return sc;
  }
  fail(ErrorKind::invalid_input, "unknown scenario '" + s + "' (expected a, b, c-exact, c-sim, c-inflated, c-emulated)");
}

bool has_sigma(Scenario s) noexcept { return s != Scenario::exact_times && s != Scenario::census; }

LogTarget make_log_target(const PosteriorRequest& request, Rng& rng) {
  request.priors.lambda.validate();
  request.priors.mu.validate();
  request.priors.sigma.validate();
  require(request.x0 >= 1, "initial population must be at least 1");
  check_emulators(request);
  switch (request.scenario) {
    case Scenario::exact_times: expect_data<obs::ExactDeathTimes>(request).validate(); break;
    case Scenario::census: expect_data<obs::CensusCounts>(request).validate(); break;
    default: expect_data<obs::ProportionObservations>(request).validate(); break;
  }

  return [&request, &rng](std::span<const double> v) -> double {
    double lp = request.priors.lambda.log_density_of_log(v[0]) + request.priors.mu.log_density_of_log(v[1]);
    if (has_sigma(request.scenario)) lp += request.priors.sigma.log_density_of_log(v[2]);
    if (!(lp > kNegInf)) return kNegInf;
    const model::BirthDeathParams params{std::exp(v[0]), std::exp(v[1]), request.x0};
    if (!(std::isfinite(params.lambda) && params.lambda > 0.0 && std::isfinite(params.mu) && params.mu > 0.0)) {
      return kNegInf;
    }
    const double sigma = has_sigma(request.scenario) ? std::exp(v[2]) : 1.0;
    if (!(std::isfinite(sigma) && sigma > 0.0)) return kNegInf;
    switch (request.scenario) {
      case Scenario::exact_times:
        return lp + loglik_exact_times(std::get<obs::ExactDeathTimes>(request.data), params);
      case Scenario::census:
        return lp + loglik_census(std::get<obs::CensusCounts>(request.data), params);
      case Scenario::proportions_exact:
        return lp + loglik_proportions_exact(std::get<obs::ProportionObservations>(request.data), params, sigma);
      case Scenario::proportions_simulated:
        return lp + loglik_proportions_simulated(std::get<obs::ProportionObservations>(request.data), params, sigma,
                                                 request.simulation, rng);
      case Scenario::proportions_inflated:
        return lp + loglik_proportions_inflated(std::get<obs::ProportionObservations>(request.data), params, sigma,
                                                request.simulation, rng);
      case Scenario::proportions_emulated:
        return lp + loglik_proportions_emulated(std::get<obs::ProportionObservations>(request.data),
                                                Theta{v[0], v[1]}, sigma, request.emulators);
    }
    return kNegInf;
  };
}

Trace run_posterior(const PosteriorRequest& request, Rng& rng) {
  const LogTarget target = make_log_target(request, rng);
  std::vector<std::string> names{"log_lambda", "log_mu"};
  std::vector<double> init{request.priors.lambda.location, request.priors.mu.location};
  if (has_sigma(request.scenario)) {
    names.push_back("log_sigma");
    init.push_back(request.priors.sigma.location);
  }
  if (!request.init.empty()) {
    require(request.init.size() == init.size(), "initial state has the wrong number of parameters");
    init = request.init;
  }
  return mh_sample(target, std::move(init), request.config, rng, std::move(names));
}

}  // namespace bdinf::mcmc
