#ifndef MLDP_RATE_HPP
#define MLDP_RATE_HPP

#include <optional>
#include <span>
#include <vector>

#include "mldp/additive.hpp"

namespace mldp {

/// Lambda(theta) = sum w (e^{theta y} - 1); Lambda(0) = 0 exactly.
double lambda_of_theta(const DiscreteMeasure& rho, double theta);

/// Lambda'(theta) = sum w y e^{theta y}.
double lambda_derivative(const DiscreteMeasure& rho, double theta);

enum class RateStatus {
  Converged,       // interior point, theta* solves Lambda'(theta) = x
  SaturatedLeft,   // boundary of the range of Lambda', theta* -> -inf
  SaturatedRight,  // boundary of the range of Lambda', theta* -> +inf
  Infinite,        // x outside the closure of the range: I(x) = +inf
  NoConvergence,
};

const char* to_string(RateStatus status) noexcept;

struct RatePoint {
  double x = 0.0;
  double value = 0.0;                 // I(x), may be +inf
  std::optional<double> theta_star;   // absent unless Converged
  unsigned iterations = 0;
  RateStatus status = RateStatus::Converged;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// I(x) = sup_theta {theta x - Lambda(theta)} via safeguarded Newton on
/// Lambda'(theta) = x. Throws NoConvergence when the iteration cap is hit.
RatePoint rate(const DiscreteMeasure& rho, double x);

/// x log x - x + 1 for x > 0, 1 at 0, +inf for x < 0.
double rate_closed_form_omega(double x);

struct RateProfile {
  DiscreteMeasure measure;
  std::vector<RatePoint> points;
};

/// Per-point failures are recorded with status NoConvergence, not thrown.
RateProfile rate_profile(const DiscreteMeasure& rho, std::span<const double> x_grid);

/// inf of I over [lo, hi] (I is convex with minimum 0 at the mean).
double rate_infimum(const DiscreteMeasure& rho, double lo, double hi);

}  // namespace mldp

#endif  // MLDP_RATE_HPP
