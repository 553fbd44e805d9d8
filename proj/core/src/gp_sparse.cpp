#include "bdinf/gp_sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/IterativeLinearSolvers>

#include "bdinf/error.hpp"
#include "gp_internal.hpp"

namespace bdinf::gp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Product of per-dimension Bohman correlations; 0 as soon as one dimension is out of range.
double bohman_product(const Theta& x, const Theta& y, const std::array<double, kInputDim>& tau) {
  double r = 1.0;
  for (int k = 0; k < kInputDim; ++k) {
    const double d = std::abs(x[k] - y[k]);
    if (d >= tau[static_cast<std::size_t>(k)]) return 0.0;
    r *= bohman(d, tau[static_cast<std::size_t>(k)]);
  }
  return r;
}

SparseMatrix training_k_tilde(std::span<const Theta> scaled, const SparseHyper& hyper,
                              const design::TrainingSet& training) {
  SparseMatrix k = sparse_cov(scaled, hyper);
  const Eigen::VectorXd nugget = nugget_variances(training);
  for (Eigen::Index j = 0; j < k.rows(); ++j) k.coeffRef(j, j) += nugget[j];
  return k;
}

double log_likelihood(const SparseHyper& hyper, std::span<const Theta> scaled, const design::TrainingSet& training,
                      const Eigen::VectorXd& residual) {
  SparseMatrix k = training_k_tilde(scaled, hyper, training);
  detail::SparseCholesky chol;
  if (!detail::factor_sparse(chol, k, hyper.a)) return kNegInf;
  return detail::sparse_mvn_log_density(residual, chol);
}

}  // namespace

double solve_sparsity_constant(double s, int n_p) {
  require(s > 0.0 && s < 1.0, "sparsity level must lie in (0, 1)");
  require(n_p >= 1, "input dimension must be at least 1");
  return 1.0 - std::sqrt(1.0 - std::pow(1.0 - s, 1.0 / n_p));
}

SparsityBudget SparsityBudget::from_sparsity(double s, int n_p) {
  return {s, n_p, solve_sparsity_constant(s, n_p)};
}

void SparsityBudget::validate() const {
  require(s > 0.0 && s < 1.0, "sparsity level must lie in (0, 1)");
  require(n_p == kInputDim, "sparse emulators are two-dimensional");
  require(c > 0.0 && c < 1.0, "sparsity constant must lie in (0, 1)");
}

double bohman(double delta, double tau) {
  require(delta >= 0.0, "Bohman distance must be non-negative");
  require(tau > 0.0, "Bohman range must be positive");
  const double u = delta / tau;
  if (u >= 1.0) return 0.0;
  const double pu = std::numbers::pi * u;
  return std::max(0.0, (1.0 - u) * std::cos(pu) + std::sin(pu) / std::numbers::pi);
}

bool tau_in_support(const std::array<double, kInputDim>& tau, const SparsityBudget& budget) {
  double sum = 0.0;
  for (double t : tau) {
    if (!(t > 0.0 && t < 1.0)) return false;
    sum += t;
  }
  return sum / budget.n_p <= budget.c;
}

Theta InputScaling::scale(const Theta& theta) const noexcept {
  Theta out;
  for (int k = 0; k < kInputDim; ++k) {
    const auto& r = reference[static_cast<std::size_t>(k)];
    out[k] = (theta[k] - r.lo) / r.width();
  }
  return out;
}

std::vector<Theta> InputScaling::scale(std::span<const Theta> points) const {
  std::vector<Theta> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(scale(p));
  return out;
}

SparseMatrix sparse_cov(std::span<const Theta> scaled, const SparseHyper& hyper) {
  const auto n = static_cast<Eigen::Index>(scaled.size());
  std::vector<std::size_t> order(scaled.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return scaled[i].log_lambda < scaled[j].log_lambda; });
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(scaled.size() * 8);
  for (Eigen::Index i = 0; i < n; ++i) entries.emplace_back(i, i, hyper.a);
  for (std::size_t p = 0; p < order.size(); ++p) {
    const std::size_t i = order[p];
    for (std::size_t q = p + 1; q < order.size(); ++q) {
      const std::size_t j = order[q];
      if (scaled[j].log_lambda - scaled[i].log_lambda >= hyper.tau[0]) break;
      const double v = hyper.a * bohman_product(scaled[i], scaled[j], hyper.tau);
      if (v > 0.0) {
        entries.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), v);
        entries.emplace_back(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i), v);
      }
    }
  }
  SparseMatrix k(n, n);
  k.setFromTriplets(entries.begin(), entries.end());
  return k;
}

SparseMatrix sparse_cross_cov(std::span<const Theta> rows, std::span<const Theta> cols, const SparseHyper& hyper) {
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double v = hyper.a * bohman_product(rows[i], cols[j], hyper.tau);
      if (v > 0.0) entries.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), v);
    }
  }
  SparseMatrix k(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  k.setFromTriplets(entries.begin(), entries.end());
  return k;
}

std::array<double, kInputDim> sample_tau_prior(const SparsityBudget& budget, Rng& rng) {
  budget.validate();
  std::uniform_real_distribution<double> box(0.0, budget.tau_box());
  for (;;) {
    std::array<double, kInputDim> tau;
    for (auto& t : tau) t = box(rng);
    if (tau_in_support(tau, budget)) return tau;
  }
}

// Log prior of the tau triangle is taken as 0 on its support (uniform, up to a constant).
double sparse_hyper_log_posterior(const SparseHyper& hyper, const design::TrainingSet& training,
                                  const MeanCoefficients& mean, const InputScaling& scaling,
                                  const SparsityBudget& budget) {
  if (!(hyper.a > 0.0 && std::isfinite(hyper.a)) || !tau_in_support(hyper.tau, budget)) return kNegInf;
  const auto scaled = scaling.scale(training.points);
  return kHyperPrior.log_density(hyper.a) +
         log_likelihood(hyper, scaled, training, detail::residuals(training, mean));
}

mcmc::McmcConfig default_sparse_hyper_config(const SparsityBudget& budget, std::uint64_t seed) {
  auto c = default_hyper_config(seed);
  const double tau_step = 0.1 * budget.tau_box();
  c.step_sd = {0.15, tau_step, tau_step};
  return c;
}

SparseHyperFit fit_sparse_hyper(const design::TrainingSet& training, const MeanCoefficients& mean,
                                const SparsityBudget& budget, const InputScaling& scaling,
                                const mcmc::McmcConfig& config, Rng& rng) {
  training.validate();
  budget.validate();
  const auto scaled = scaling.scale(training.points);
  const Eigen::VectorXd residual = detail::residuals(training, mean);
  const double resid_var = std::max(residual.squaredNorm() / static_cast<double>(residual.size()), 1e-4);

  auto target = [&](std::span<const double> v) {
    const SparseHyper h{std::exp(v[0]), {v[1], v[2]}};
    if (!(h.a > 0.0 && std::isfinite(h.a)) || !tau_in_support(h.tau, budget)) return kNegInf;
    return kHyperPrior.log_density_of_log(v[0]) + log_likelihood(h, scaled, training, residual);
  };
  const double box = budget.tau_box();
  const mcmc::ReflectingBounds reflect{std::nullopt, std::pair{0.0, box}, std::pair{0.0, box}};
  const double tau0 = 0.9 * budget.c;

  SparseHyperFit fit;
  fit.trace = mcmc::mh_sample(target, {std::log(resid_var), tau0, tau0}, config, rng, {"log_a", "tau1", "tau2"},
                              reflect);
  const auto& s = fit.trace.samples;
  fit.hyper.a = s.col(0).array().exp().mean();
  fit.hyper.tau = {s.col(1).mean(), s.col(2).mean()};
  return fit;
}

struct SparseEmulator::Solver {
  detail::SparseCholesky chol;
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
  bool iterative = false;
};

SparseEmulator::SparseEmulator(design::TrainingSet training, MeanCoefficients mean, SparseHyper hyper,
                               InputScaling scaling, SparsityBudget budget, EmulatorOptions options,
                               SparseSolverOptions solver)
    : training_(std::move(training)),
      mean_(mean),
      hyper_(hyper),
      scaling_(scaling),
      budget_(budget),
      options_(options),
      solver_(std::make_unique<Solver>()) {
  training_.validate();
  budget_.validate();
  require(hyper_.a > 0.0, "covariance variance must be positive");
  require(tau_in_support(hyper_.tau, budget_), "support ranges violate the sparsity constraint");
  scaled_points_ = scaling_.scale(training_.points);
  k_tilde_ = training_k_tilde(scaled_points_, hyper_, training_);

  solver_->chol.analyzePattern(k_tilde_);
  if (solver_->chol.factor_nonzeros() > solver.max_factor_nonzeros) {
    solver_->iterative = true;
    solver_->cg.setTolerance(solver.cg_tolerance);
    solver_->cg.compute(k_tilde_);
  } else {
    const auto jitter = detail::factor_sparse(solver_->chol, k_tilde_, hyper_.a);
    if (!jitter) {
      fail(ErrorKind::factorization_failure,
           "sparse training covariance at t=" + std::to_string(training_.t) + " is not positive definite");
    }
    jitter_ = *jitter;
  }
  alpha_ = solve(detail::residuals(training_, mean_));
}

SparseEmulator::~SparseEmulator() = default;

Eigen::VectorXd SparseEmulator::solve(const Eigen::VectorXd& rhs) const {
  if (solver_->iterative) return solver_->cg.solve(rhs);
  return solver_->chol.solve(rhs);
}

bool SparseEmulator::uses_iterative_solver() const noexcept { return solver_->iterative; }

Eigen::MatrixXd SparseEmulator::kernel_matrix(std::span<const Theta> a, std::span<const Theta> b) const {
  const auto sa = scaling_.scale(a);
  const auto sb = scaling_.scale(b);
  Eigen::MatrixXd k(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < sa.size(); ++i) {
    for (std::size_t j = 0; j < sb.size(); ++j) {
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = hyper_.a * bohman_product(sa[i], sb[j], hyper_.tau);
    }
  }
  return k;
}

Eigen::MatrixXd SparseEmulator::solve_training(const Eigen::MatrixXd& rhs) const {
  Eigen::MatrixXd out(rhs.rows(), rhs.cols());
  for (Eigen::Index c = 0; c < rhs.cols(); ++c) out.col(c) = solve(rhs.col(c));
  return out;
}

Prediction SparseEmulator::predict(const Theta& theta) const {
  const Theta s = scaling_.scale(theta);
  const auto n = static_cast<Eigen::Index>(scaled_points_.size());
  Eigen::VectorXd k = Eigen::VectorXd::Zero(n);
  bool any = false;
  double correction = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = hyper_.a * bohman_product(s, scaled_points_[static_cast<std::size_t>(i)], hyper_.tau);
    if (v > 0.0) {
      k[i] = v;
      correction += v * alpha_[i];
      any = true;
    }
  }
  const double mean = mean_(theta) + correction;
  const double quad = any ? k.dot(solve(k)) : 0.0;
  const double reduced = std::max(hyper_.a - quad, 1e-12 * hyper_.a);
  return {mean, reduced + prediction_nugget(mean)};
}

std::vector<Prediction> SparseEmulator::predict_dense_path(std::span<const Theta> points) const {
  const Eigen::MatrixXd dense = Eigen::MatrixXd(k_tilde_);
  const Eigen::LLT<Eigen::MatrixXd> llt(dense);
  if (llt.info() != Eigen::Success) fail(ErrorKind::factorization_failure, "dense path factorization failed");
  const Eigen::VectorXd alpha = llt.solve(detail::residuals(training_, mean_));
  const Eigen::MatrixXd cross = kernel_matrix(points, training_.points);
  std::vector<Prediction> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::VectorXd k = cross.row(static_cast<Eigen::Index>(i)).transpose();
    const double mean = mean_(points[i]) + k.dot(alpha);
    const double reduced = std::max(hyper_.a - k.dot(llt.solve(k)), 1e-12 * hyper_.a);
    out.push_back({mean, reduced + prediction_nugget(mean)});
  }
  return out;
}

double SparseEmulator::off_diagonal_zero_fraction() const noexcept {
  const auto n = static_cast<double>(k_tilde_.rows());
  if (n < 2) return 0.0;
  const double off_nonzero = static_cast<double>(k_tilde_.nonZeros()) - n;
  return 1.0 - off_nonzero / (n * n - n);
}

nlohmann::json SparseEmulator::to_json() const {
  nlohmann::json j;
  j["kind"] = "sparse";
  j["t"] = training_.t;
  j["n"] = training_.n;
  auto& pts = j["points"] = nlohmann::json::array();
  for (const auto& p : training_.points) pts.push_back({p.log_lambda, p.log_mu});
  j["p_hat"] = training_.p_hat;
  j["targets"] = training_.targets;
  j["retained_idx"] = training_.retained_idx;
  j["mean"] = mean_.b;
  j["hyper"] = {{"a", hyper_.a}, {"tau", hyper_.tau}};
  j["scaling"] = {{scaling_.reference[0].lo, scaling_.reference[0].hi},
                  {scaling_.reference[1].lo, scaling_.reference[1].hi}};
  j["budget"] = {{"s", budget_.s}, {"n_p", budget_.n_p}, {"c", budget_.c}};
  j["prediction_nugget"] = options_.prediction_nugget;
  j["jitter"] = jitter_;
  j["off_diagonal_zero_fraction"] = off_diagonal_zero_fraction();
  return j;
}

std::shared_ptr<SparseEmulator> fit_sparse_emulator(const design::TrainingSet& training,
                                                    const SparsityBudget& budget, const InputScaling& scaling,
                                                    const mcmc::McmcConfig& config, Rng& rng,
                                                    EmulatorOptions options) {
  const auto mean = fit_mean(training);
  const auto fit = fit_sparse_hyper(training, mean, budget, scaling, config, rng);
  return std::make_shared<SparseEmulator>(training, mean, fit.hyper, scaling, budget, options);
}

}  // namespace bdinf::gp
