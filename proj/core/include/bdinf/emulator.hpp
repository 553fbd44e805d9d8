#pragma once

#include <memory>
#include <span>

#include <Eigen/Dense>
#include <json.hpp>

#include "bdinf/theta.hpp"

namespace bdinf::gp {

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Gaussian-process emulator of the empirical logit of the simulated dead
/// fraction at one census time. Fitted emulators are immutable; all const
/// members are safe to call concurrently.
class Emulator {
 public:
  virtual ~Emulator() = default;

  virtual double time() const noexcept = 0;
  /// Replicate count n behind the training proportions.
  virtual int replicates() const noexcept = 0;
  /// Covariance variance parameter a.
  virtual double signal_variance() const noexcept = 0;
  virtual bool includes_prediction_nugget() const noexcept = 0;

  /// Least-squares mean function m(theta).
  virtual double prior_mean(const Theta& theta) const = 0;
  /// Nugget-free covariance K(a_i, b_j).
  virtual Eigen::MatrixXd kernel_matrix(std::span<const Theta> a, std::span<const Theta> b) const = 0;
  /// K~(Theta, Theta)^{-1} rhs over the training design.
  virtual Eigen::MatrixXd solve_training(const Eigen::MatrixXd& rhs) const = 0;
  virtual std::span<const Theta> training_points() const noexcept = 0;

  virtual Prediction predict(const Theta& theta) const = 0;

  /// Binomial nugget 1/{n q(1-q)} at a prediction point, q = eexpit(m*) from the
  /// nugget-free predictive mean; 0 when prediction nuggets are disabled.
  double prediction_nugget(double predictive_mean) const;

  virtual nlohmann::json to_json() const = 0;
};

using EmulatorPtr = std::shared_ptr<const Emulator>;

/// Rebuilds a dense or sparse emulator from its serialized form.
EmulatorPtr emulator_from_json(const nlohmann::json& j);

}  // namespace bdinf::gp
