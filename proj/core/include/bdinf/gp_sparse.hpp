#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "bdinf/design.hpp"
#include "bdinf/emulator.hpp"
#include "bdinf/gp_dense.hpp"
#include "bdinf/mcmc.hpp"

namespace bdinf::gp {

/// c solves c(2 - c) = (1 - s)^{1/n_p}: c = 1 - sqrt(1 - (1 - s)^{1/n_p}).
double solve_sparsity_constant(double s, int n_p);

struct SparsityBudget {
  double s = 0.9;
  int n_p = kInputDim;
  double c = 0.0;

  static SparsityBudget from_sparsity(double s, int n_p = kInputDim);
  void validate() const;
  /// Upper end of the per-dimension box the tau prior is drawn from.
  double tau_box() const noexcept { return std::min(1.0, n_p * c); }
};

/// Bohman correlation: (1 - d/tau) cos(pi d/tau) + sin(pi d/tau)/pi for d < tau, else 0.
double bohman(double delta, double tau);

struct SparseHyper {
  double a = 1.0;
  std::array<double, kInputDim> tau{0.1, 0.1};
};

/// True when every tau_k is in (0, 1) and sum(tau) / n_p <= c.
bool tau_in_support(const std::array<double, kInputDim>& tau, const SparsityBudget& budget);

/// Min-max scaling of each input dimension onto [0, 1].
struct InputScaling {
  design::Bounds reference;

  Theta scale(const Theta& theta) const noexcept;
  std::vector<Theta> scale(std::span<const Theta> points) const;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// a prod_k R_k(|x_ik - x_jk|; tau_k) on scaled inputs; only nonzeros stored.
SparseMatrix sparse_cov(std::span<const Theta> scaled, const SparseHyper& hyper);
SparseMatrix sparse_cross_cov(std::span<const Theta> rows, std::span<const Theta> cols, const SparseHyper& hyper);

/// Uniform on the sparsity triangle by rejection from the box (0, tau_box)^n_p.
std::array<double, kInputDim> sample_tau_prior(const SparsityBudget& budget, Rng& rng);

double sparse_hyper_log_posterior(const SparseHyper& hyper, const design::TrainingSet& training,
                                  const MeanCoefficients& mean, const InputScaling& scaling,
                                  const SparsityBudget& budget);

/// Defaults as for dense fits; proposal sds 0.15 on log a and 0.1 tau_box on each tau.
mcmc::McmcConfig default_sparse_hyper_config(const SparsityBudget& budget, std::uint64_t seed = 1);

struct SparseHyperFit {
  SparseHyper hyper;  // posterior mean
  mcmc::Trace trace;
};

/// MH over (log a, tau) with a ~ LN(0, 10) and the uniform triangle prior on tau;
/// tau proposals are reflected inside the box.
SparseHyperFit fit_sparse_hyper(const design::TrainingSet& training, const MeanCoefficients& mean,
                                const SparsityBudget& budget, const InputScaling& scaling,
                                const mcmc::McmcConfig& config, Rng& rng);

struct SparseSolverOptions {
  /// Factor nonzeros above which solves switch to conjugate gradients.
  std::size_t max_factor_nonzeros = 20'000'000;
  double cg_tolerance = 1e-10;
};

class SparseEmulator final : public Emulator {
 public:
  SparseEmulator(design::TrainingSet training, MeanCoefficients mean, SparseHyper hyper, InputScaling scaling,
                 SparsityBudget budget, EmulatorOptions options = {}, SparseSolverOptions solver = {});
  ~SparseEmulator() override;
  SparseEmulator(const SparseEmulator&) = delete;
  SparseEmulator& operator=(const SparseEmulator&) = delete;

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

  /// Same predictions through a dense Cholesky of the identical matrix.
  std::vector<Prediction> predict_dense_path(std::span<const Theta> points) const;

  const design::TrainingSet& training() const noexcept { return training_; }
  const MeanCoefficients& mean() const noexcept { return mean_; }
  const SparseHyper& hyper() const noexcept { return hyper_; }
  const InputScaling& scaling() const noexcept { return scaling_; }
  const SparsityBudget& budget() const noexcept { return budget_; }
  /// K~(Theta, Theta) including nugget and jitter.
  const SparseMatrix& training_covariance() const noexcept { return k_tilde_; }
  /// Fraction of off-diagonal entries of K that are exactly zero.
  double off_diagonal_zero_fraction() const noexcept;
  bool uses_iterative_solver() const noexcept;
  double jitter() const noexcept { return jitter_; }

 private:
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  struct Solver;

  design::TrainingSet training_;
  std::vector<Theta> scaled_points_;
  MeanCoefficients mean_;
  SparseHyper hyper_;
  InputScaling scaling_;
  SparsityBudget budget_;
  EmulatorOptions options_;
  double jitter_ = 0.0;
  SparseMatrix k_tilde_;
  std::unique_ptr<Solver> solver_;
  Eigen::VectorXd alpha_;
};

std::shared_ptr<SparseEmulator> fit_sparse_emulator(const design::TrainingSet& training,
                                                    const SparsityBudget& budget, const InputScaling& scaling,
                                                    const mcmc::McmcConfig& config, Rng& rng,
                                                    EmulatorOptions options = {});

}  // namespace bdinf::gp
