#pragma once

#include <stdexcept>
#include <string>

namespace bdinf {

enum class ErrorKind {
  invalid_input,
  survival_rate_too_high,
  degenerate_logit,
  rank_deficiency,
  insufficient_design,
  factorization_failure,
  diagnostics_failure,
  mcmc_failure,
  io_failure,
};

const char* to_string(ErrorKind kind) noexcept;

// All library failures are reported through this type; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, const char* what) {
  if (!condition) fail(ErrorKind::invalid_input, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::invalid_input, what);
}

}  // namespace bdinf
