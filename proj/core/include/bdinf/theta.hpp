#pragma once

#include <cmath>

#include "bdinf/birth_death.hpp"

namespace bdinf {

/// A point in (log lambda, log mu) space: the emulator input and design coordinate.
struct Theta {
  double log_lambda = 0.0;
  double log_mu = 0.0;

  double operator[](int k) const noexcept { return k == 0 ? log_lambda : log_mu; }
  double& operator[](int k) noexcept { return k == 0 ? log_lambda : log_mu; }

  model::BirthDeathParams params(int x0) const { return {std::exp(log_lambda), std::exp(log_mu), x0}; }

  friend bool operator==(const Theta&, const Theta&) = default;
};

inline constexpr int kInputDim = 2;

}  // namespace bdinf
