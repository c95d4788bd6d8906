#ifndef MLDP_ERRORS_HPP
#define MLDP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mldp {

enum class ErrorKind {
  Parameter,
  Source,
  BudgetExceeded,
  Overflow,
  EmptySystem,
  PrimeNotInSystem,
  NonIntegerStatistic,
  NoConvergence,
  EmptySample,
};

const char* to_string(ErrorKind kind) noexcept;

// Base of every error raised by the library. The kind decides the CLI exit
// code, so callers rarely need to catch the concrete subclasses.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define MLDP_DEFINE_ERROR(Name, Kind)                                  \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  }

MLDP_DEFINE_ERROR(ParameterError, Parameter);
MLDP_DEFINE_ERROR(SourceError, Source);
MLDP_DEFINE_ERROR(BudgetExceeded, BudgetExceeded);
MLDP_DEFINE_ERROR(OverflowError, Overflow);
MLDP_DEFINE_ERROR(EmptySystem, EmptySystem);
MLDP_DEFINE_ERROR(PrimeNotInSystem, PrimeNotInSystem);
MLDP_DEFINE_ERROR(NonIntegerStatistic, NonIntegerStatistic);
MLDP_DEFINE_ERROR(NoConvergence, NoConvergence);
MLDP_DEFINE_ERROR(EmptySample, EmptySample);

#undef MLDP_DEFINE_ERROR

}  // namespace mldp

#endif  // MLDP_ERRORS_HPP
