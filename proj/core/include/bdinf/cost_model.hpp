#pragma once

namespace bdinf::cost {

struct CostModelInputs {
  double n_d = 150;
  double n = 1000;
  double tau = 1.0;  // cpu units per unit simulated time per replicate
  double T = 11.0;
  double n_iter = 1e4;
  double n_iter_gp = 5000;
  double n_iter_gp_fit = 1e4;

  void validate() const;
};

struct CostReport {
  double simulator_units = 0.0;  // n tau T N_iter
  double gp_units = 0.0;         // T n_d {n tau + n_d^2 (N_GP + N_GPfit)}
  double lhs = 0.0;              // n_d^3 (N_GP + N_iter)
  double rhs = 0.0;              // n tau (N_iter - n_d)
  bool gp_more_efficient = false;
  /// Smallest tau for which the GP route wins; infinite when N_iter <= n_d.
  double breakeven_tau = 0.0;
};

CostReport evaluate(const CostModelInputs& in);

}  // namespace bdinf::cost
