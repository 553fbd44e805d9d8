#include "bdinf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bdinf/error.hpp"
#include "bdinf/stats.hpp"
#include "gp_internal.hpp"

namespace bdinf::diag {

std::string to_string(Mode m) { return m == Mode::literal ? "literal" : "predictive"; }

Mode mode_from_string(const std::string& s) {
  if (s == "literal") return Mode::literal;
  if (s == "predictive") return Mode::predictive;
  fail(ErrorKind::invalid_input, "unknown diagnostics mode '" + s + "'");
}

void ValidationSet::validate() const {
  require(n >= 1, "validation replicate count must be positive");
  require(points.size() == targets.size(), "validation points and targets differ in length");
  require(points.size() >= kMinValidationPoints, "validation set needs at least 10 points");
  for (double x : targets) require(std::isfinite(x), "validation targets must be finite");
}

std::vector<double> individual_prediction_errors(const gp::Emulator& emulator, const ValidationSet& validation,
                                                 Mode mode) {
  validation.validate();
  std::vector<double> ipe;
  ipe.reserve(validation.size());
  for (std::size_t i = 0; i < validation.size(); ++i) {
    const auto pred = emulator.predict(validation.points[i]);
    const double var = mode == Mode::predictive
                           ? pred.variance
                           : emulator.signal_variance() + emulator.prediction_nugget(pred.mean);
    ipe.push_back((validation.targets[i] - pred.mean) / std::sqrt(var));
  }
  return ipe;
}

std::vector<double> pit_statistics(std::span<const double> ipe) {
  std::vector<double> pit;
  pit.reserve(ipe.size());
  for (double e : ipe) {
    require(std::isfinite(e), "IPE values must be finite");
    pit.push_back(stats::normal_cdf(e));
  }
  return pit;
}

JointPredictive joint_predictive(const gp::Emulator& emulator, std::span<const Theta> points, Mode mode) {
  const auto m = static_cast<Eigen::Index>(points.size());
  JointPredictive out;
  out.mean.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) out.mean[i] = emulator.predict(points[static_cast<std::size_t>(i)]).mean;

  out.cov = emulator.kernel_matrix(points, points);
  if (mode == Mode::predictive) {
    const Eigen::MatrixXd cross = emulator.kernel_matrix(emulator.training_points(), points);
    out.cov -= cross.transpose() * emulator.solve_training(cross);
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  }
  for (Eigen::Index i = 0; i < m; ++i) out.cov(i, i) += emulator.prediction_nugget(out.mean[i]);
  return out;
}

MahalanobisResult mahalanobis(const gp::Emulator& emulator, const ValidationSet& validation, Mode mode) {
  validation.validate();
  const auto jp = joint_predictive(emulator, validation.points, mode);
  const Eigen::VectorXd r =
      Eigen::Map<const Eigen::VectorXd>(validation.targets.data(), static_cast<Eigen::Index>(validation.size())) -
      jp.mean;
  const auto factor = gp::detail::factor_dense(jp.cov, emulator.signal_variance());
  if (!factor) {
    fail(ErrorKind::diagnostics_failure,
         "validation covariance at t=" + std::to_string(validation.t) + " is singular after jitter");
  }
  MahalanobisResult res;
  res.md2 = factor->llt.matrixL().solve(r).squaredNorm();
  res.df = static_cast<int>(validation.size());
  res.interval = stats::chi_squared_interval(res.df, 0.95);
  return res;
}

DiagnosticsReport diagnose(const gp::Emulator& emulator, const ValidationSet& validation, Mode mode) {
  DiagnosticsReport rep;
  rep.t = validation.t;
  rep.mode = mode;
  rep.points = validation.points;
  rep.targets = validation.targets;
  for (const auto& p : validation.points) rep.predictions.push_back(emulator.predict(p));
  rep.ipe = individual_prediction_errors(emulator, validation, mode);
  rep.pit = pit_statistics(rep.ipe);
  const auto md = mahalanobis(emulator, validation, mode);
  rep.md2 = md.md2;
  rep.df = md.df;
  rep.chi2_interval = md.interval;
  rep.md2_pass = md.inside();
  const auto within = std::count_if(rep.ipe.begin(), rep.ipe.end(), [](double e) { return std::abs(e) <= 1.96; });
  rep.ipe_within_fraction = static_cast<double>(within) / static_cast<double>(rep.ipe.size());
  return rep;
}

std::vector<ValidationSet> build_validation_sets(const design::Bounds& bounds, std::span<const double> times,
                                                 const design::SimulatorConfig& config,
                                                 const ValidationOptions& options, Rng& rng) {
  require(options.points >= static_cast<int>(kMinValidationPoints), "validation set needs at least 10 points");
  require(options.candidates >= options.points, "validation candidates must cover the requested points");
  const auto design = design::maximin_lhd(options.candidates, bounds, rng, options.maximin);
  auto sim = config;
  sim.seed = rng();
  const auto responses = design::simulate_design(design, times, sim);

  std::vector<ValidationSet> out;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto training = design::select_training_set(design, responses, k, options.scope);
    if (training.size() < static_cast<std::size_t>(options.points)) {
      fail(ErrorKind::insufficient_design, "only " + std::to_string(training.size()) +
                                               " validation candidates retained at t=" + std::to_string(times[k]));
    }
    std::vector<std::size_t> idx(training.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < static_cast<std::size_t>(options.points); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (idx.size() - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(static_cast<std::size_t>(options.points));
    std::sort(idx.begin(), idx.end());
    ValidationSet v;
    v.t = times[k];
    v.n = config.n;
    for (std::size_t i : idx) {
      v.points.push_back(training.points[i]);
      v.targets.push_back(training.targets[i]);
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace bdinf::diag
