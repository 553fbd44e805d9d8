#include <benchmark/benchmark.h>

#include <bdinf/birth_death.hpp>
#include <bdinf/gp_dense.hpp>
#include <bdinf/gp_sparse.hpp>
#include <bdinf/mcmc.hpp>

using namespace bdinf;

namespace {

const model::BirthDeathParams kParams{0.6, 1.0, 10};

struct Fixture {
  design::Bounds bounds = design::prior_central_bounds(mcmc::Priors{});
  design::TrainingSet training;
  gp::MeanCoefficients mean;

  explicit Fixture(int n_d) {
    Rng rng(7);
    const auto d = design::maximin_lhd(n_d, bounds, rng, {3, 500});
    design::SimulatorConfig sim;
    sim.n = 1000;
    training = design::build_training_set(d, 5.0, sim, rng);
    mean = gp::fit_mean(training);
  }
};

const Fixture& fixture(int n_d) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(n_d);
  if (it == cache.end()) it = cache.emplace(n_d, Fixture(n_d)).first;
  return it->second;
}

void BM_ExtinctionProb(benchmark::State& state) {
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model::extinction_prob(kParams, t));
    t = t > 20 ? 0.1 : t + 0.01;
  }
}
BENCHMARK(BM_ExtinctionProb);

void BM_SimulateCohort(benchmark::State& state) {
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(model::simulate_cohort(kParams, static_cast<int>(state.range(0)), 11.0, seed++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateCohort)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_LoglikExactTimes(benchmark::State& state) {
  Rng rng(3);
  const auto data = obs::generate_exact_times(kParams, 1000, obs::kDefaultExactHorizon, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mcmc::loglik_exact_times(data, kParams));
}
BENCHMARK(BM_LoglikExactTimes)->Unit(benchmark::kMicrosecond);

void BM_HyperLogPosterior(benchmark::State& state) {
  const auto& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gp::hyper_log_posterior({1.0, 0.5, 0.5}, f.training, f.mean));
  state.counters["points"] = static_cast<double>(f.training.size());
}
BENCHMARK(BM_HyperLogPosterior)->Arg(300)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_DensePredict(benchmark::State& state) {
  const auto& f = fixture(static_cast<int>(state.range(0)));
  const gp::DenseEmulator em(f.training, f.mean, {1.0, 0.5, 0.5});
  Theta th{-0.5, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(em.predict(th));
    th.log_lambda += 1e-6;
  }
}
BENCHMARK(BM_DensePredict)->Arg(300)->Arg(2000)->Unit(benchmark::kMicrosecond);

void BM_SparsePredict(benchmark::State& state) {
  const auto& f = fixture(static_cast<int>(state.range(0)));
  const auto budget = gp::SparsityBudget::from_sparsity(0.9);
  const gp::SparseEmulator em(f.training, f.mean, {1.0, {0.1, 0.1}}, gp::InputScaling{f.bounds}, budget);
  Theta th{-0.5, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(em.predict(th));
    th.log_lambda += 1e-6;
  }
  state.counters["zero_fraction"] = em.off_diagonal_zero_fraction();
}
BENCHMARK(BM_SparsePredict)->Arg(300)->Arg(2000)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
