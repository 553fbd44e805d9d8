#include "bdinf/gp_dense.hpp"

#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "bdinf/error.hpp"
#include "bdinf/stats.hpp"
#include "gp_internal.hpp"

namespace bdinf::gp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::MatrixXd gauss_kernel(std::span<const Theta> a, std::span<const Theta> b, const DenseHyper& hyper) {
  Eigen::MatrixXd k(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gauss_cov(a[i], b[j], hyper);
    }
  }
  return k;
}

Eigen::MatrixXd training_covariance(const design::TrainingSet& training, const DenseHyper& hyper) {
  const auto n = static_cast<Eigen::Index>(training.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = hyper.a;
    for (Eigen::Index j = 0; j < i; ++j) {
      k(i, j) = k(j, i) = gauss_cov(training.points[i], training.points[j], hyper);
    }
  }
  k.diagonal() += nugget_variances(training);
  return k;
}

}  // namespace

std::array<double, 6> MeanCoefficients::basis(const Theta& t) noexcept {
  return {1.0, t.log_lambda, t.log_mu, t.log_lambda * t.log_lambda, t.log_mu * t.log_mu, t.log_lambda * t.log_mu};
}

double MeanCoefficients::operator()(const Theta& theta) const noexcept {
  const auto h = basis(theta);
  double s = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) s += b[k] * h[k];
  return s;
}

MeanCoefficients fit_mean(const design::TrainingSet& training) {
  require(training.points.size() == training.targets.size(), "training points and targets must align");
  const auto n = static_cast<Eigen::Index>(training.size());
  if (n < 6) fail(ErrorKind::rank_deficiency, "quadratic mean needs at least 6 training points");
  Eigen::MatrixXd h(n, 6);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = MeanCoefficients::basis(training.points[static_cast<std::size_t>(i)]);
    for (int k = 0; k < 6; ++k) h(i, k) = row[static_cast<std::size_t>(k)];
    y[i] = training.targets[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(h);
  qr.setThreshold(1e-10);
  if (qr.rank() < 6) {
    fail(ErrorKind::rank_deficiency, "quadratic mean basis has rank " + std::to_string(qr.rank()) +
                                         " on the training points; need 6");
  }
  const Eigen::VectorXd coef = qr.solve(y);
  MeanCoefficients out;
  for (int k = 0; k < 6; ++k) out.b[static_cast<std::size_t>(k)] = coef[k];
  return out;
}

double gauss_cov(const Theta& x, const Theta& y, const DenseHyper& hyper) noexcept {
  const double d1 = (x.log_lambda - y.log_lambda) / hyper.r1;
  const double d2 = (x.log_mu - y.log_mu) / hyper.r2;
  return hyper.a * std::exp(-d1 * d1 - d2 * d2);
}

Eigen::VectorXd nugget_variances(const design::TrainingSet& training) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(training.size()));
  for (std::size_t i = 0; i < training.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = model::elogit_variance(training.p_hat[i], training.n);
  }
  return v;
}

double hyper_log_posterior(const DenseHyper& hyper, const design::TrainingSet& training,
                           const MeanCoefficients& mean) {
  if (!(hyper.a > 0.0 && hyper.r1 > 0.0 && hyper.r2 > 0.0)) return kNegInf;
  if (!(std::isfinite(hyper.a) && std::isfinite(hyper.r1) && std::isfinite(hyper.r2))) return kNegInf;
  const double log_prior =
      kHyperPrior.log_density(hyper.a) + kHyperPrior.log_density(hyper.r1) + kHyperPrior.log_density(hyper.r2);
  const auto factor = detail::factor_dense(training_covariance(training, hyper), hyper.a);
  if (!factor) return kNegInf;
  return log_prior + detail::mvn_log_density(detail::residuals(training, mean), factor->llt);
}

mcmc::McmcConfig default_hyper_config(std::uint64_t seed) {
  mcmc::McmcConfig c;
  c.iterations = 5000;
  c.burnin = 1000;
  c.thin = 4;
  c.step_sd = {0.15, 0.15, 0.15};
  c.seed = seed;
  return c;
}

DenseHyperFit fit_hyper(const design::TrainingSet& training, const MeanCoefficients& mean,
                        const mcmc::McmcConfig& config, Rng& rng) {
  training.validate();
  const Eigen::VectorXd r = detail::residuals(training, mean);
  const double resid_var = std::max(r.squaredNorm() / static_cast<double>(r.size()), 1e-4);
  auto target = [&](std::span<const double> v) {
    const DenseHyper h{std::exp(v[0]), std::exp(v[1]), std::exp(v[2])};
    return hyper_log_posterior(h, training, mean) + v[0] + v[1] + v[2];
  };
  DenseHyperFit fit;
  fit.trace = mcmc::mh_sample(target, {std::log(resid_var), 0.0, 0.0}, config, rng, {"log_a", "log_r1", "log_r2"});
  const Eigen::ArrayXXd values = fit.trace.samples.array().exp();
  const Eigen::ArrayXd means = values.colwise().mean();
  fit.hyper = {means[0], means[1], means[2]};
  return fit;
}

DenseEmulator::DenseEmulator(design::TrainingSet training, MeanCoefficients mean, DenseHyper hyper,
                             EmulatorOptions options)
    : training_(std::move(training)), mean_(mean), hyper_(hyper), options_(options) {
  training_.validate();
  require(hyper_.a > 0.0 && hyper_.r1 > 0.0 && hyper_.r2 > 0.0, "covariance hyperparameters must be positive");
  auto factor = detail::factor_dense(training_covariance(training_, hyper_), hyper_.a);
  if (!factor) {
    fail(ErrorKind::factorization_failure,
         "training covariance at t=" + std::to_string(training_.t) + " is not positive definite after jitter");
  }
  jitter_ = factor->jitter;
  factor_ = std::move(factor->llt);
  alpha_ = factor_.solve(detail::residuals(training_, mean_));
}

Eigen::MatrixXd DenseEmulator::kernel_matrix(std::span<const Theta> a, std::span<const Theta> b) const {
  return gauss_kernel(a, b, hyper_);
}

Eigen::MatrixXd DenseEmulator::solve_training(const Eigen::MatrixXd& rhs) const { return factor_.solve(rhs); }

Prediction DenseEmulator::predict(const Theta& theta) const {
  const auto n = static_cast<Eigen::Index>(training_.size());
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) k[i] = gauss_cov(theta, training_.points[static_cast<std::size_t>(i)], hyper_);
  const double mean = mean_(theta) + k.dot(alpha_);
  const Eigen::VectorXd w = factor_.matrixL().solve(k);
  const double reduced = std::max(hyper_.a - w.squaredNorm(), 1e-12 * hyper_.a);
  return {mean, reduced + prediction_nugget(mean)};
}

nlohmann::json DenseEmulator::to_json() const {
  nlohmann::json j;
  j["kind"] = "dense";
  j["t"] = training_.t;
  j["n"] = training_.n;
  auto& pts = j["points"] = nlohmann::json::array();
  for (const auto& p : training_.points) pts.push_back({p.log_lambda, p.log_mu});
  j["p_hat"] = training_.p_hat;
  j["targets"] = training_.targets;
  j["retained_idx"] = training_.retained_idx;
  j["mean"] = mean_.b;
  j["hyper"] = {{"a", hyper_.a}, {"r1", hyper_.r1}, {"r2", hyper_.r2}};
  j["prediction_nugget"] = options_.prediction_nugget;
  j["jitter"] = jitter_;
  return j;
}

std::shared_ptr<DenseEmulator> fit_dense_emulator(const design::TrainingSet& training,
                                                  const mcmc::McmcConfig& config, Rng& rng,
                                                  EmulatorOptions options) {
  const auto mean = fit_mean(training);
  const auto fit = fit_hyper(training, mean, config, rng);
  return std::make_shared<DenseEmulator>(training, mean, fit.hyper, options);
}

}  // namespace bdinf::gp
