#include "bdinf/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bdinf/error.hpp"
#include "bdinf/parallel.hpp"
#include "bdinf/stats.hpp"

namespace bdinf::design {
namespace {

using Unit = std::array<double, kInputDim>;

double squared_distance(const Unit& a, const Unit& b) {
  double s = 0.0;
  for (int k = 0; k < kInputDim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

std::vector<Unit> random_unit_lhd(int n, Rng& rng) {
  std::vector<Unit> u(static_cast<std::size_t>(n));
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int k = 0; k < kInputDim; ++k) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < n; ++i) u[i][k] = (perm[i] + uniform01(rng)) / n;
  }
  return u;
}

double min_squared_distance(const std::vector<Unit>& u) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = i + 1; j < u.size(); ++j) best = std::min(best, squared_distance(u[i], u[j]));
  }
  return best;
}

Design to_design(const std::vector<Unit>& u, const Bounds& bounds) {
  Design d;
  d.bounds = bounds;
  d.points.reserve(u.size());
  for (const auto& p : u) {
    Theta t;
    for (int k = 0; k < kInputDim; ++k) t[k] = bounds[k].lo + p[k] * bounds[k].width();
    d.points.push_back(t);
  }
  return d;
}

// Nearest-neighbour bookkeeping so a swap costs O(n) instead of O(n^2).
class MaximinState {
 public:
  explicit MaximinState(std::vector<Unit> u) : u_(std::move(u)), nn_dist_(u_.size()), nn_idx_(u_.size()) {
    for (std::size_t i = 0; i < u_.size(); ++i) refresh(i);
  }

  const std::vector<Unit>& points() const noexcept { return u_; }

  std::size_t critical() const {
    return static_cast<std::size_t>(std::min_element(nn_dist_.begin(), nn_dist_.end()) - nn_dist_.begin());
  }
  double min_distance() const { return nn_dist_[critical()]; }
  std::size_t neighbour(std::size_t i) const { return nn_idx_[i]; }

  bool try_swap(std::size_t i, std::size_t j, int k) {
    const double floor = min_distance();
    std::swap(u_[i][k], u_[j][k]);
    const std::size_t n = u_.size();
    di_.resize(n);
    dj_.resize(n);
    double involving = squared_distance(u_[i], u_[j]);
    for (std::size_t m = 0; m < n; ++m) {
      di_[m] = squared_distance(u_[i], u_[m]);
      dj_[m] = squared_distance(u_[j], u_[m]);
      if (m != i && m != j) involving = std::min({involving, di_[m], dj_[m]});
    }
    if (involving < floor) {
      std::swap(u_[i][k], u_[j][k]);
      return false;
    }
    for (std::size_t m = 0; m < n; ++m) {
      if (m == i || m == j) continue;
      if (nn_idx_[m] == i || nn_idx_[m] == j) {
        refresh(m);
      } else if (di_[m] < nn_dist_[m] || dj_[m] < nn_dist_[m]) {
        if (di_[m] <= dj_[m]) {
          nn_dist_[m] = di_[m];
          nn_idx_[m] = i;
        } else {
          nn_dist_[m] = dj_[m];
          nn_idx_[m] = j;
        }
      }
    }
    refresh(i);
    refresh(j);
    return true;
  }

 private:
  void refresh(std::size_t i) {
    nn_dist_[i] = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < u_.size(); ++m) {
      if (m == i) continue;
      const double d = squared_distance(u_[i], u_[m]);
      if (d < nn_dist_[i]) {
        nn_dist_[i] = d;
        nn_idx_[i] = m;
      }
    }
  }

  std::vector<Unit> u_;
  std::vector<double> nn_dist_;
  std::vector<std::size_t> nn_idx_;
  std::vector<double> di_, dj_;
};

}  // namespace

Bounds prior_central_bounds(const mcmc::Priors& priors, double mass) {
  require(mass > 0.0 && mass < 1.0, "prior mass must lie strictly between 0 and 1");
  priors.lambda.validate();
  priors.mu.validate();
  const double z = stats::normal_quantile(0.5 + 0.5 * mass);
  auto central = [z](const mcmc::LogNormalPrior& p) {
    const double half = z * std::sqrt(p.scale_var);
    return Interval{p.location - half, p.location + half};
  };
  return {central(priors.lambda), central(priors.mu)};
}

double min_pairwise_distance(const Design& design) {
  std::vector<Unit> u;
  u.reserve(design.size());
  for (const auto& p : design.points) {
    Unit v;
    for (int k = 0; k < kInputDim; ++k) v[k] = (p[k] - design.bounds[k].lo) / design.bounds[k].width();
    u.push_back(v);
  }
  return std::sqrt(min_squared_distance(u));
}

Design random_lhd(int n_d, const Bounds& bounds, Rng& rng) {
  require(n_d >= 1, "design needs at least one point");
  for (const auto& b : bounds) require(b.hi > b.lo, "design bounds must have positive width");
  return to_design(random_unit_lhd(n_d, rng), bounds);
}

Design maximin_lhd(int n_d, const Bounds& bounds, Rng& rng, const MaximinOptions& options) {
  require(n_d >= 2, "maximin design needs at least two points");
  require(options.random_starts >= 1 && options.swap_attempts >= 0, "invalid maximin search options");
  for (const auto& b : bounds) require(b.hi > b.lo, "design bounds must have positive width");

  std::vector<Unit> best;
  double best_dist = -1.0;
  for (int s = 0; s < options.random_starts; ++s) {
    auto candidate = random_unit_lhd(n_d, rng);
    const double d = min_squared_distance(candidate);
    if (d > best_dist) {
      best_dist = d;
      best = std::move(candidate);
    }
  }

  MaximinState state(std::move(best));
  std::uniform_int_distribution<std::size_t> pick(0, static_cast<std::size_t>(n_d) - 1);
  std::uniform_int_distribution<int> pick_dim(0, kInputDim - 1);
  for (int attempt = 0; attempt < options.swap_attempts; ++attempt) {
    // Move one end of the closest pair.
    std::size_t i = state.critical();
    if (uniform01(rng) < 0.5) i = state.neighbour(i);
    std::size_t j = pick(rng);
    if (j == i) continue;
    state.try_swap(i, j, pick_dim(rng));
  }
  return to_design(state.points(), bounds);
}

void TrainingSet::validate() const {
  require(n >= 1, "training replicate count must be positive");
  require(points.size() == targets.size() && points.size() == p_hat.size(),
          "training points, proportions and targets must align");
  require(retained_idx.empty() || retained_idx.size() == points.size(), "retained indices must align with points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(p_hat[i] > kRetainLo && p_hat[i] < kRetainHi, "training proportions must lie in (0.005, 0.995)");
    require(std::isfinite(targets[i]), "training targets must be finite");
  }
}

DesignResponses simulate_design(const Design& design, std::span<const double> times, const SimulatorConfig& config) {
  require(config.n >= 1, "replicate count must be at least 1");
  require(config.x0 >= 1, "initial population must be at least 1");
  DesignResponses out;
  out.times.assign(times.begin(), times.end());
  out.n = config.n;
  out.dead.assign(design.size(), {});
  parallel_for(design.size(), config.workers, [&](std::size_t i) {
    Rng rng = make_stream(config.seed, i);
    const auto props =
        model::estimate_proportions(design.points[i].params(config.x0), config.n, times, rng, config.simulator);
    auto& row = out.dead[i];
    row.reserve(props.size());
    for (const auto& p : props) row.push_back(p.dead);
  });
  return out;
}

TrainingSet select_training_set(const Design& design, const DesignResponses& responses, std::size_t time_index,
                                FilterScope scope) {
  require(time_index < responses.times.size(), "census time index out of range");
  require(responses.dead.size() == design.size(), "responses do not match the design");
  auto inside = [&](std::size_t i, std::size_t k) {
    const double p = responses.p_hat(i, k);
    return p > kRetainLo && p < kRetainHi;
  };
  TrainingSet out;
  out.t = responses.times[time_index];
  out.n = responses.n;
  for (std::size_t i = 0; i < design.size(); ++i) {
    bool keep = inside(i, time_index);
    if (scope == FilterScope::global) {
      for (std::size_t k = 0; keep && k < responses.times.size(); ++k) keep = inside(i, k);
    }
    if (!keep) continue;
    const double p = responses.p_hat(i, time_index);
    out.points.push_back(design.points[i]);
    out.p_hat.push_back(p);
    out.targets.push_back(model::elogit(p, responses.n));
    out.retained_idx.push_back(static_cast<int>(i));
  }
  if (out.size() < kMinTrainingPoints) {
    fail(ErrorKind::insufficient_design, "only " + std::to_string(out.size()) + " of " +
                                             std::to_string(design.size()) + " design points kept at t=" +
                                             std::to_string(out.t) + "; need at least " +
                                             std::to_string(kMinTrainingPoints));
  }
  return out;
}

TrainingSet build_training_set(const Design& design, double t, const SimulatorConfig& config, Rng& rng) {
  require(std::isfinite(t) && t > 0.0, "census time must be positive");
  SimulatorConfig cfg = config;
  cfg.seed = rng();
  const double times[] = {t};
  const auto responses = simulate_design(design, times, cfg);
  return select_training_set(design, responses, 0);
}

}  // namespace bdinf::design
