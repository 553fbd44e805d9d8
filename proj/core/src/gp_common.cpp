#include <cmath>

#include "bdinf/birth_death.hpp"
#include "bdinf/emulator.hpp"
#include "bdinf/error.hpp"
#include "gp_internal.hpp"

namespace bdinf::gp {

double Emulator::prediction_nugget(double predictive_mean) const {
  if (!includes_prediction_nugget()) return 0.0;
  const int n = replicates();
  return model::elogit_variance(model::eexpit(predictive_mean, n), n);
}

namespace detail {

std::optional<DenseFactor> factor_dense(const Eigen::MatrixXd& k_tilde, double a) {
  for (double step : kJitterLadder) {
    DenseFactor f;
    f.jitter = step * a;
    if (f.jitter == 0.0) {
      f.llt.compute(k_tilde);
    } else {
      Eigen::MatrixXd jittered = k_tilde;
      jittered.diagonal().array() += f.jitter;
      f.llt.compute(jittered);
    }
    if (f.llt.info() == Eigen::Success) return f;
  }
  return std::nullopt;
}

double mvn_log_density(const Eigen::VectorXd& residual, const Eigen::LLT<Eigen::MatrixXd>& llt) {
  const Eigen::VectorXd z = llt.matrixL().solve(residual);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * (z.squaredNorm() + log_det + static_cast<double>(residual.size()) * stats::kLogTwoPi);
}

std::optional<double> factor_sparse(SparseCholesky& chol, SparseMatrix& k_tilde, double a) {
  chol.analyzePattern(k_tilde);
  double applied = 0.0;
  for (double step : kJitterLadder) {
    const double jitter = step * a;
    if (jitter > applied) {
      for (Eigen::Index j = 0; j < k_tilde.rows(); ++j) k_tilde.coeffRef(j, j) += jitter - applied;
      applied = jitter;
    }
    chol.factorize(k_tilde);
    if (chol.info() == Eigen::Success) return applied;
  }
  return std::nullopt;
}

double sparse_mvn_log_density(const Eigen::VectorXd& residual, const SparseCholesky& chol) {
  const Eigen::VectorXd alpha = chol.solve(residual);
  return -0.5 * (residual.dot(alpha) + chol.log_determinant() +
                 static_cast<double>(residual.size()) * stats::kLogTwoPi);
}

}  // namespace detail
}  // namespace bdinf::gp
