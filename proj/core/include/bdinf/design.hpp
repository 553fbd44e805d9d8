#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "bdinf/birth_death.hpp"
#include "bdinf/mcmc.hpp"
#include "bdinf/random.hpp"
#include "bdinf/theta.hpp"

namespace bdinf::design {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double width() const noexcept { return hi - lo; }
};

using Bounds = std::array<Interval, kInputDim>;

/// Central `mass` region of the independent log-normal priors on lambda and mu,
/// in log space. mass must lie in (0, 1).
Bounds prior_central_bounds(const mcmc::Priors& priors, double mass = 0.95);

struct Design {
  std::vector<Theta> points;
  Bounds bounds;

  std::size_t size() const noexcept { return points.size(); }
};

struct MaximinOptions {
  int random_starts = 50;
  int swap_attempts = 2000;
};

/// Smallest pairwise Euclidean distance after scaling each dimension to [0, 1].
double min_pairwise_distance(const Design& design);

/// Latin hypercube with one point per equal-width stratum in each dimension.
Design random_lhd(int n_d, const Bounds& bounds, Rng& rng);

/// Best of `random_starts` random LHDs, then coordinate-swap hill climbing
/// that never lowers the minimum pairwise distance.
Design maximin_lhd(int n_d, const Bounds& bounds, Rng& rng, const MaximinOptions& options = {});

/// Strict retention band for training proportions.
inline constexpr double kRetainLo = 0.005;
inline constexpr double kRetainHi = 0.995;
inline constexpr std::size_t kMinTrainingPoints = 10;

/// Emulator training data at one census time.
struct TrainingSet {
  double t = 0.0;
  int n = 0;
  std::vector<Theta> points;
  std::vector<double> p_hat;
  std::vector<double> targets;  // elogit(p_hat, n)
  std::vector<int> retained_idx;

  std::size_t size() const noexcept { return points.size(); }
  void validate() const;
};

struct SimulatorConfig {
  int x0 = 10;
  int n = 1000;
  std::uint64_t seed = 1;
  int workers = 1;
  model::SimulatorOptions simulator;
};

/// Dead counts at every (design point, census time); point i uses substream i of seed.
struct DesignResponses {
  std::vector<double> times;
  int n = 0;
  std::vector<std::vector<int>> dead;  // [point][time]

  double p_hat(std::size_t point, std::size_t time) const {
    return static_cast<double>(dead[point][time]) / n;
  }
};

DesignResponses simulate_design(const Design& design, std::span<const double> times, const SimulatorConfig& config);

enum class FilterScope {
  per_time,  // each census time keeps its own retained subset
  global,    // a point extreme at any census time is dropped everywhere
};

/// Training set at times[time_index]; throws insufficient_design below kMinTrainingPoints.
TrainingSet select_training_set(const Design& design, const DesignResponses& responses, std::size_t time_index,
                                FilterScope scope = FilterScope::per_time);

/// Simulates n cells at every design point and keeps proportions strictly inside
/// (0.005, 0.995). Point i uses make_stream(rng(), i).
TrainingSet build_training_set(const Design& design, double t, const SimulatorConfig& config, Rng& rng);

}  // namespace bdinf::design
