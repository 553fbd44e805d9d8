#include "bdinf/cost_model.hpp"

#include <cmath>
#include <limits>

#include "bdinf/error.hpp"

namespace bdinf::cost {

void CostModelInputs::validate() const {
  for (double v : {n_d, n, tau, T, n_iter, n_iter_gp, n_iter_gp_fit}) {
    require(std::isfinite(v) && v > 0.0, "cost-model inputs must be positive and finite");
  }
}

CostReport evaluate(const CostModelInputs& in) {
  in.validate();
  CostReport r;
  const double nd3 = in.n_d * in.n_d * in.n_d;
  r.simulator_units = in.n * in.tau * in.T * in.n_iter;
  r.gp_units = in.T * in.n_d * (in.n * in.tau + in.n_d * in.n_d * (in.n_iter_gp + in.n_iter_gp_fit));
  r.lhs = nd3 * (in.n_iter_gp + in.n_iter);
  r.rhs = in.n * in.tau * (in.n_iter - in.n_d);
  r.gp_more_efficient = r.lhs < r.rhs;
  r.breakeven_tau = in.n_iter > in.n_d ? r.lhs / (in.n * (in.n_iter - in.n_d))
                                       : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace bdinf::cost
