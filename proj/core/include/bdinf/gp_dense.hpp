#pragma once

#include <array>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "bdinf/design.hpp"
#include "bdinf/emulator.hpp"
#include "bdinf/mcmc.hpp"

namespace bdinf::gp {

/// m(theta) = b0 + b1 ll + b2 lm + b3 ll^2 + b4 lm^2 + b5 ll lm, with ll = log lambda, lm = log mu.
struct MeanCoefficients {
  std::array<double, 6> b{};

  static std::array<double, 6> basis(const Theta& theta) noexcept;
  double operator()(const Theta& theta) const noexcept;
};

/// Ordinary least squares over the training set. Throws rank_deficiency when the
/// quadratic basis is not identifiable from the training points.
MeanCoefficients fit_mean(const design::TrainingSet& training);

/// a exp{-(d ll / r1)^2 - (d lm / r2)^2}.
struct DenseHyper {
  double a = 1.0;
  double r1 = 1.0;
  double r2 = 1.0;
};

double gauss_cov(const Theta& x, const Theta& y, const DenseHyper& hyper) noexcept;

/// Binomial nugget 1/{n p_hat (1 - p_hat)} from the observed training proportions.
Eigen::VectorXd nugget_variances(const design::TrainingSet& training);

/// Independent LN(0, 10) priors on each covariance hyperparameter.
inline constexpr mcmc::LogNormalPrior kHyperPrior{0.0, 10.0};

/// Log prior of (a, r1, r2) plus the normal log density of the training targets
/// with mean m(Theta) and covariance K + diag(nugget). -inf if factorization fails
/// after the jitter ladder.
double hyper_log_posterior(const DenseHyper& hyper, const design::TrainingSet& training,
                           const MeanCoefficients& mean);

/// 5000 iterations, 1000 burn-in, thin 4, step sd 0.15 on each log hyperparameter.
mcmc::McmcConfig default_hyper_config(std::uint64_t seed = 1);

struct DenseHyperFit {
  DenseHyper hyper;  // posterior mean
  mcmc::Trace trace;
};

/// Random-walk MH on (log a, log r1, log r2); returns component-wise posterior means.
DenseHyperFit fit_hyper(const design::TrainingSet& training, const MeanCoefficients& mean,
                        const mcmc::McmcConfig& config, Rng& rng);

struct EmulatorOptions {
  /// Add the binomial nugget at the prediction point to v*.
  bool prediction_nugget = true;
};

class DenseEmulator final : public Emulator {
 public:
  DenseEmulator(design::TrainingSet training, MeanCoefficients mean, DenseHyper hyper, EmulatorOptions options = {});

  double time() const noexcept override { return training_.t; }
  int replicates() const noexcept override { return training_.n; }
  double signal_variance() const noexcept override { return hyper_.a; }
  bool includes_prediction_nugget() const noexcept override { return options_.prediction_nugget; }
  double prior_mean(const Theta& theta) const override { return mean_(theta); }
  Eigen::MatrixXd kernel_matrix(std::span<const Theta> a, std::span<const Theta> b) const override;
  Eigen::MatrixXd solve_training(const Eigen::MatrixXd& rhs) const override;
  std::span<const Theta> training_points() const noexcept override { return training_.points; }
  Prediction predict(const Theta& theta) const override;
  nlohmann::json to_json() const override;

  const design::TrainingSet& training() const noexcept { return training_; }
  const MeanCoefficients& mean() const noexcept { return mean_; }
  const DenseHyper& hyper() const noexcept { return hyper_; }
  /// Diagonal jitter that made K~ factorizable (0 when none was needed).
  double jitter() const noexcept { return jitter_; }

 private:
  design::TrainingSet training_;
  MeanCoefficients mean_;
  DenseHyper hyper_;
  EmulatorOptions options_;
  double jitter_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  Eigen::VectorXd alpha_;  // K~^{-1} (y - m(Theta))
};

/// fit_mean, fit_hyper, then the delta-approximation emulator at the posterior mean.
std::shared_ptr<DenseEmulator> fit_dense_emulator(const design::TrainingSet& training,
                                                  const mcmc::McmcConfig& config, Rng& rng,
                                                  EmulatorOptions options = {});

}  // namespace bdinf::gp
