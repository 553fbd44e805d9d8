#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include <bdinf/error.hpp>
#include <bdinf/gp_sparse.hpp>
#include <bdinf/stats.hpp>

#include "test_support.hpp"

using namespace bdinf;
using gp::SparseHyper;

namespace {

std::vector<Theta> unit_points(int n, Rng& rng) {
  std::vector<Theta> p(static_cast<std::size_t>(n));
  for (auto& x : p) x = {uniform01(rng), uniform01(rng)};
  return p;
}

double dense_entry(const Theta& x, const Theta& y, const SparseHyper& h) {
  return h.a * gp::bohman(std::abs(x[0] - y[0]), h.tau[0]) * gp::bohman(std::abs(x[1] - y[1]), h.tau[1]);
}

struct Fixture {
  design::TrainingSet ts;
  std::shared_ptr<gp::SparseEmulator> sparse;
  std::shared_ptr<gp::DenseEmulator> dense;
};

const Fixture& fitted() {
  static const Fixture f = [] {
    Fixture out;
    Rng rng(30);
    const auto bounds = testing::default_bounds();
    const auto d = design::maximin_lhd(2000, bounds, rng, {5, 2000});
    out.ts = testing::binomial_training_set(d.points, 5.0, 1000, 10, rng);
    const auto budget = gp::SparsityBudget::from_sparsity(0.9);
    out.sparse = gp::fit_sparse_emulator(out.ts, budget, gp::InputScaling{bounds},
                                         gp::default_sparse_hyper_config(budget), rng);
    out.dense = gp::fit_dense_emulator(out.ts, gp::default_hyper_config(), rng);
    return out;
  }();
  return f;
}

}  // namespace

TEST_CASE("Bohman function") {
  CHECK(gp::bohman(0.0, 0.3) == 1.0);
  CHECK(gp::bohman(0.3, 0.3) == 0.0);
  CHECK(gp::bohman(0.5, 0.3) == 0.0);
  CHECK(gp::bohman(0.15, 0.3) == doctest::Approx(1.0 / M_PI).epsilon(1e-12));
  CHECK(gp::bohman(0.3 - 1e-4 * 0.3, 0.3) < 1e-6);
  double prev = 1.0;
  for (double d = 0.0; d < 0.3; d += 0.001) {
    const double v = gp::bohman(d, 0.3);
    CHECK(v <= prev);
    CHECK(v >= 0.0);
    prev = v;
  }
}

TEST_CASE("sparsity constant") {
  CHECK(std::abs(2 * gp::solve_sparsity_constant(0.9, 2) - 0.346) < 0.001);
  CHECK(gp::solve_sparsity_constant(1e-12, 2) > 0.999);
  CHECK(gp::solve_sparsity_constant(0.99, 2) == doctest::Approx(1 - std::sqrt(0.9)).epsilon(1e-12));
  CHECK(gp::solve_sparsity_constant(0.99, 2) == doctest::Approx(0.0513).epsilon(1e-3));
  for (double s : {0.1, 0.5, 0.9, 0.95}) {
    for (int np : {1, 2, 3}) {
      const double c = gp::solve_sparsity_constant(s, np);
      CHECK(c * (2 - c) == doctest::Approx(std::pow(1 - s, 1.0 / np)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(gp::solve_sparsity_constant(1.0, 2), Error);
  CHECK_THROWS_AS(gp::solve_sparsity_constant(0.9, 0), Error);
}

TEST_CASE("sparse covariance structure") {
  const SparseHyper h{1.7, {0.2, 0.3}};
  SUBCASE("a distance beyond tau in one dimension zeroes the entry") {
    const std::vector<Theta> pts{{0.1, 0.5}, {0.35, 0.5}, {0.1, 0.79}};
    const auto k = gp::sparse_cov(pts, h);
    CHECK(k.coeff(0, 1) == 0.0);
    CHECK(k.coeff(0, 2) > 0.0);
    for (int i = 0; i < 3; ++i) CHECK(k.coeff(i, i) == 1.7);
  }
  SUBCASE("five hand-placed points match dense evaluation") {
    const std::vector<Theta> pts{{0.0, 0.0}, {0.1, 0.05}, {0.15, 0.25}, {0.5, 0.5}, {0.55, 0.45}};
    const Eigen::MatrixXd k = Eigen::MatrixXd(gp::sparse_cov(pts, h));
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) CHECK(std::abs(k(i, j) - dense_entry(pts[i], pts[j], h)) < 1e-14);
  }
  SUBCASE("only nonzeros are stored and the pattern is symmetric") {
    Rng rng(1);
    const auto pts = unit_points(300, rng);
    auto k = gp::sparse_cov(pts, h);
    k.makeCompressed();
    for (int c = 0; c < k.outerSize(); ++c)
      for (gp::SparseMatrix::InnerIterator it(k, c); it; ++it) CHECK(it.value() != 0.0);
    const Eigen::MatrixXd dense = Eigen::MatrixXd(k);
    CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() == 0.0);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i)
      for (int j = 0; j < 300; ++j) worst = std::max(worst, std::abs(dense(i, j) - dense_entry(pts[i], pts[j], h)));
    CHECK(worst < 1e-14);

    const auto cross = Eigen::MatrixXd(gp::sparse_cross_cov(pts, std::span(pts).first(40), h));
    CHECK((cross - dense.leftCols(40)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("Bohman covariance is positive semidefinite on random designs") {
  Rng rng(2);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const auto pts = unit_points(100, rng);
    const SparseHyper h{1.0, {0.05 + 0.4 * uniform01(rng), 0.05 + 0.4 * uniform01(rng)}};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(gp::sparse_cov(pts, h)), Eigen::EigenvaluesOnly);
    worst = std::min(worst, es.eigenvalues().minCoeff());
  }
  CHECK(worst >= -1e-8);
}

TEST_CASE("tau prior is uniform on the triangle") {
  const auto budget = gp::SparsityBudget::from_sparsity(0.9);
  CHECK(2 * budget.c == doctest::Approx(0.3462).epsilon(1e-3));
  Rng rng(3);
  const int n = 10000;
  std::vector<double> sums, firsts;
  for (int i = 0; i < n; ++i) {
    const auto tau = gp::sample_tau_prior(budget, rng);
    CHECK(gp::tau_in_support(tau, budget));
    sums.push_back(tau[0] + tau[1]);
    firsts.push_back(tau[0]);
  }
  // Right triangle with legs 2c: the sum has mean (2/3) 2c and each coordinate (1/3) 2c.
  const double two_c = 2 * budget.c;
  CHECK(std::abs(stats::mean(sums) - two_c * 2 / 3) < 3 * stats::stddev(sums) / std::sqrt(n));
  CHECK(std::abs(stats::mean(firsts) - two_c / 3) < 3 * stats::stddev(firsts) / std::sqrt(n));
  // Marginal of one coordinate: F(x) = 1 - (1 - x / 2c)^2.
  const double d = testing::ks_statistic(firsts, [&](double x) { return 1 - std::pow(1 - x / two_c, 2); });
  CHECK(testing::ks_pvalue(d, firsts.size()) > 0.01);
}

TEST_CASE("triangle support") {
  const auto budget = gp::SparsityBudget::from_sparsity(0.9);
  CHECK(gp::tau_in_support({0.1, 0.1}, budget));
  CHECK_FALSE(gp::tau_in_support({0.3, 0.1}, budget));
  CHECK_FALSE(gp::tau_in_support({0.0, 0.1}, budget));
  const auto scale = gp::InputScaling{testing::default_bounds()};
  const auto& ts = fitted().ts;
  const auto mean = gp::fit_mean(ts);
  CHECK(gp::sparse_hyper_log_posterior({1.0, {0.3, 0.1}}, ts, mean, scale, budget) ==
        -std::numeric_limits<double>::infinity());
  CHECK(std::isfinite(gp::sparse_hyper_log_posterior({1.0, {0.1, 0.1}}, ts, mean, scale, budget)));
}

TEST_CASE("fitted sparse emulator") {
  const auto& f = fitted();
  const auto& em = *f.sparse;
  const auto budget = em.budget();
  MESSAGE("tau=(", em.hyper().tau[0], ", ", em.hyper().tau[1], ") a=", em.hyper().a,
          " zero fraction=", em.off_diagonal_zero_fraction(), " n=", f.ts.size());
  CHECK(gp::tau_in_support(em.hyper().tau, budget));
  CHECK(em.off_diagonal_zero_fraction() >= 0.5);
  CHECK_FALSE(em.uses_iterative_solver());

  const auto& b = testing::default_bounds();
  std::vector<Theta> grid;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) grid.push_back({b[0].lo + b[0].width() * (i + 0.5) / 20, b[1].lo + b[1].width() * (j + 0.5) / 20});

  SUBCASE("positive variance on a 20x20 grid") {
    for (const auto& th : grid) CHECK(em.predict(th).variance > 0.0);
  }
  SUBCASE("sparse and dense solves of the same matrix agree") {
    const auto dense_path = em.predict_dense_path(grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto p = em.predict(grid[i]);
      worst = std::max({worst, std::abs(p.mean - dense_path[i].mean), std::abs(p.variance - dense_path[i].variance)});
    }
    CHECK(worst < 1e-8);
  }
  SUBCASE("far from all training points the prior is returned exactly") {
    const Theta far{b[0].hi + 5.0, b[1].hi + 5.0};
    const auto p = em.predict(far);
    CHECK(p.mean == em.prior_mean(far));
    CHECK(p.variance == em.signal_variance() + em.prediction_nugget(p.mean));
  }
  SUBCASE("agrees with the dense emulator") {
    Rng rng(31);
    const auto test = design::maximin_lhd(100, b, rng, {5, 200}).points;
    double diff = 0.0, sd = 0.0;
    for (const auto& th : test) {
      const auto ps = em.predict(th);
      const auto pd = f.dense->predict(th);
      diff += std::abs(ps.mean - pd.mean);
      sd += 0.5 * (std::sqrt(ps.variance) + std::sqrt(pd.variance));
    }
    MESSAGE("mean |sparse - dense| = ", diff / 100, ", mean predictive sd = ", sd / 100);
    CHECK(diff < 2 * sd);
  }
  SUBCASE("iterative fallback") {
    gp::SparseSolverOptions cg;
    cg.max_factor_nonzeros = 0;
    const gp::SparseEmulator iterative(em.training(), em.mean(), em.hyper(), em.scaling(), em.budget(), {}, cg);
    CHECK(iterative.uses_iterative_solver());
    double worst = 0.0;
    for (const auto& th : grid) {
      const auto p = em.predict(th);
      const auto q = iterative.predict(th);
      worst = std::max({worst, std::abs(p.mean - q.mean), std::abs(p.variance - q.variance)});
    }
    CHECK(worst < 1e-6);
  }
  SUBCASE("serialization") {
    const auto j = em.to_json();
    CHECK(j["kind"] == "sparse");
    CHECK(j["budget"]["c"].get<double>() == budget.c);
    const auto back = gp::emulator_from_json(j);
    for (std::size_t i = 0; i < grid.size(); i += 7) {
      CHECK(back->predict(grid[i]).mean == em.predict(grid[i]).mean);
      CHECK(back->predict(grid[i]).variance == em.predict(grid[i]).variance);
    }
  }
}
