#include "bdinf/error.hpp"

namespace bdinf {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::survival_rate_too_high: return "survival-rate-too-high";
    case ErrorKind::degenerate_logit: return "degenerate-logit";
    case ErrorKind::rank_deficiency: return "rank-deficiency";
    case ErrorKind::insufficient_design: return "insufficient-design";
    case ErrorKind::factorization_failure: return "factorization-failure";
    case ErrorKind::diagnostics_failure: return "diagnostics-failure";
    case ErrorKind::mcmc_failure: return "mcmc-failure";
    case ErrorKind::io_failure: return "io-failure";
  }
  return "unknown";
}

}  // namespace bdinf
