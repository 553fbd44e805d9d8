#pragma once

#include <array>
#include <cmath>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

#include "bdinf/stats.hpp"

namespace bdinf::gp::detail {

/// Diagonal jitter, in units of a, tried in order until Cholesky succeeds.
inline constexpr std::array<double, 4> kJitterLadder{0.0, 1e-10, 1e-8, 1e-6};

struct DenseFactor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};

std::optional<DenseFactor> factor_dense(const Eigen::MatrixXd& k_tilde, double a);

/// log N(r | 0, K) given the Cholesky factor of K.
double mvn_log_density(const Eigen::VectorXd& residual, const Eigen::LLT<Eigen::MatrixXd>& llt);

using SparseMatrix = Eigen::SparseMatrix<double>;

class SparseCholesky : public Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> {
 public:
  /// Nonzeros of L known after analyzePattern().
  std::size_t factor_nonzeros() const { return static_cast<std::size_t>(m_nonZerosPerCol.sum()); }

  double log_determinant() const {
    const auto& l = matrixL().nestedExpression();
    double s = 0.0;
    for (Eigen::Index j = 0; j < l.outerSize(); ++j) s += std::log(l.coeff(j, j));
    return 2.0 * s;
  }
};

/// Factorizes k_tilde + jitter a I along the ladder; returns the jitter used or nullopt.
std::optional<double> factor_sparse(SparseCholesky& chol, SparseMatrix& k_tilde, double a);

double sparse_mvn_log_density(const Eigen::VectorXd& residual, const SparseCholesky& chol);

/// Residuals y - m(Theta) of the training set.
template <typename Training, typename Mean>
Eigen::VectorXd residuals(const Training& training, const Mean& mean) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(training.size()));
  for (std::size_t i = 0; i < training.size(); ++i) {
    r[static_cast<Eigen::Index>(i)] = training.targets[i] - mean(training.points[i]);
  }
  return r;
}

}  // namespace bdinf::gp::detail
