#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bdinf/design.hpp"
#include "bdinf/emulator.hpp"

namespace bdinf::diag {

/// literal: standardize by K~(theta, theta); predictive: by the conditional
/// predictive (co)variance given the training data.
enum class Mode { literal, predictive };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct ValidationSet {
  double t = 0.0;
  int n = 0;
  std::vector<Theta> points;
  std::vector<double> targets;  // elogit of fresh simulated proportions

  std::size_t size() const noexcept { return points.size(); }
  void validate() const;
};

inline constexpr std::size_t kMinValidationPoints = 10;

std::vector<double> individual_prediction_errors(const gp::Emulator& emulator, const ValidationSet& validation,
                                                 Mode mode = Mode::predictive);

/// Elementwise standard normal CDF.
std::vector<double> pit_statistics(std::span<const double> ipe);

struct JointPredictive {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Mean m* and covariance at `points` (with per-point prediction nuggets on the diagonal).
JointPredictive joint_predictive(const gp::Emulator& emulator, std::span<const Theta> points,
                                 Mode mode = Mode::predictive);

struct MahalanobisResult {
  double md2 = 0.0;
  int df = 0;
  std::pair<double, double> interval;  // central 95% of chi^2_df

  bool inside() const noexcept { return md2 >= interval.first && md2 <= interval.second; }
};

MahalanobisResult mahalanobis(const gp::Emulator& emulator, const ValidationSet& validation,
                              Mode mode = Mode::predictive);

struct DiagnosticsReport {
  double t = 0.0;
  Mode mode = Mode::predictive;
  std::vector<Theta> points;
  std::vector<double> targets;
  std::vector<gp::Prediction> predictions;
  std::vector<double> ipe;
  std::vector<double> pit;
  double md2 = 0.0;
  int df = 0;
  std::pair<double, double> chi2_interval;
  double ipe_within_fraction = 0.0;  // share of |ipe| <= 1.96
  bool md2_pass = false;
};

DiagnosticsReport diagnose(const gp::Emulator& emulator, const ValidationSet& validation,
                           Mode mode = Mode::predictive);

struct ValidationOptions {
  int points = 75;       // n_d-dagger per census time
  int candidates = 2000; // size of the fresh LHD before filtering
  design::MaximinOptions maximin;
  design::FilterScope scope = design::FilterScope::per_time;  // should match training
};

/// Fresh maximin LHD over `bounds`, simulated once at every time; per time,
/// extreme proportions are dropped and `points` survivors are drawn without replacement.
std::vector<ValidationSet> build_validation_sets(const design::Bounds& bounds, std::span<const double> times,
                                                 const design::SimulatorConfig& config,
                                                 const ValidationOptions& options, Rng& rng);

}  // namespace bdinf::diag
