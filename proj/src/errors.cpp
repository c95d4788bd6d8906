#include "mldp/errors.hpp"

namespace mldp {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parameter: return "ParameterError";
    case ErrorKind::Source: return "SourceError";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::EmptySystem: return "EmptySystem";
    case ErrorKind::PrimeNotInSystem: return "PrimeNotInSystem";
    case ErrorKind::NonIntegerStatistic: return "NonIntegerStatistic";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::EmptySample: return "EmptySample";
  }
  return "Error";
}

}  // namespace mldp
