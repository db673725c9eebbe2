#pragma once

#include <stdexcept>
#include <string>

namespace dicke {

/// Base of every error raised by the library. Each subclass names the
/// failure class so callers (and the CLI exit-code mapping) can dispatch.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual const char *kind() const noexcept { return "Error"; }
};

#define DICKE_DEFINE_ERROR(Name)                                             \
  class Name : public Error {                                                \
  public:                                                                    \
    using Error::Error;                                                      \
    const char *kind() const noexcept override { return #Name; }             \
  }

/// Quadratic form is not positive-definite (phase boundary crossed).
DICKE_DEFINE_ERROR(InstabilityError);
DICKE_DEFINE_ERROR(ConvergenceError);
DICKE_DEFINE_ERROR(DomainError);
DICKE_DEFINE_ERROR(DegenerateError);
DICKE_DEFINE_ERROR(RootError);
/// Phase-branch evaluated outside its domain of validity.
DICKE_DEFINE_ERROR(PhaseError);
DICKE_DEFINE_ERROR(GridError);
/// Hilbert-space dimension exceeds the configured budget.
DICKE_DEFINE_ERROR(BudgetError);
DICKE_DEFINE_ERROR(ConventionMismatch);
DICKE_DEFINE_ERROR(ValidationError);

#undef DICKE_DEFINE_ERROR

} // namespace dicke
