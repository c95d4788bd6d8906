#include "mldp/rate.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mldp/errors.hpp"

namespace mldp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr unsigned kIterationCap = 200;

double lambda_second(const DiscreteMeasure& rho, double theta) {
  double s = 0.0;
  for (const auto& a : rho.atoms()) s += a.w * a.y * a.y * std::exp(theta * a.y);
  return s;
}

double mass_where(const DiscreteMeasure& rho, bool positive) {
  double m = 0.0;
  for (const auto& a : rho.atoms())
    if (positive ? a.y > 0.0 : a.y < 0.0) m += a.w;
  return m;
}

}  // namespace

const char* to_string(RateStatus status) noexcept {
  switch (status) {
    case RateStatus::Converged: return "converged";
    case RateStatus::SaturatedLeft: return "saturated-left";
    case RateStatus::SaturatedRight: return "saturated-right";
    case RateStatus::Infinite: return "infinite";
    case RateStatus::NoConvergence: return "no-convergence";
  }
  return "?";
}

double lambda_of_theta(const DiscreteMeasure& rho, double theta) {
  if (theta == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& a : rho.atoms()) s += a.w * std::expm1(theta * a.y);
  return s;
}

double lambda_derivative(const DiscreteMeasure& rho, double theta) {
  double s = 0.0;
  for (const auto& a : rho.atoms()) s += a.w * a.y * std::exp(theta * a.y);
  return s;
}

RatePoint rate(const DiscreteMeasure& rho, double x) {
  if (rho.empty()) throw ParameterError("rate of an empty measure");
  if (!std::isfinite(x)) throw ParameterError("rate needs a finite x");
  RatePoint point;
  point.x = x;

  // Range of Lambda' over theta in R is the open interval (lower, upper).
  const double ymin = rho.min_support();
  const double ymax = rho.max_support();
  const double lower = ymin < 0.0 ? -kInf : 0.0;
  const double upper = ymax > 0.0 ? kInf : 0.0;

  if (lower == upper) {  // rho = delta_0, Lambda == 0
    point.status = x == 0.0 ? RateStatus::Converged : RateStatus::Infinite;
    point.value = x == 0.0 ? 0.0 : kInf;
    if (x == 0.0) point.theta_star = 0.0;
    return point;
  }
  if (x < lower || x > upper) {
    point.status = RateStatus::Infinite;
    point.value = kInf;
    return point;
  }
  if (x == lower) {  // theta -> -inf: I = -lim Lambda = mass of y > 0
    point.status = RateStatus::SaturatedLeft;
    point.value = mass_where(rho, true);
    return point;
  }
  if (x == upper) {
    point.status = RateStatus::SaturatedRight;
    point.value = mass_where(rho, false);
    return point;
  }

  const double tol = 1e-12 * std::max(1.0, std::abs(x));
  auto residual = [&](double theta) { return lambda_derivative(rho, theta) - x; };

  double theta = 0.0;
  double f = residual(theta);
  if (std::abs(f) <= tol) {
    point.theta_star = 0.0;
    point.value = 0.0;
    return point;
  }

  // Bracket [lo, hi] with Lambda'(lo) < x < Lambda'(hi), grown geometrically from +-1.
  double lo, hi;
  if (f < 0.0) {
    lo = 0.0;
    hi = 1.0;
    while (residual(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) throw NoConvergence("could not bracket Lambda'(theta) = x from above");
    }
  } else {
    hi = 0.0;
    lo = -1.0;
    while (residual(lo) > 0.0) {
      hi = lo;
      lo *= 2.0;
      if (!std::isfinite(lo)) throw NoConvergence("could not bracket Lambda'(theta) = x from below");
    }
  }

  theta = std::min(std::max(theta, lo), hi);
  for (unsigned iter = 1; iter <= kIterationCap; ++iter) {
    point.iterations = iter;
    f = residual(theta);
    if (std::abs(f) <= tol) break;
    if (f < 0.0) lo = theta;
    else hi = theta;
    const double slope = lambda_second(rho, theta);
    double next = theta - f / slope;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    // Bracket exhausted at machine resolution.
    if (next == theta || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(theta))) {
      theta = next;
      break;
    }
    theta = next;
    if (iter == kIterationCap) {
      throw NoConvergence("rate(x = " + std::to_string(x) + ") hit the iteration cap; last bracket [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
  }

  point.theta_star = theta;
  point.bracket_lo = lo;
  point.bracket_hi = hi;
  point.value = theta * x - lambda_of_theta(rho, theta);
  return point;
}

double rate_closed_form_omega(double x) {
  if (x < 0.0) return kInf;
  if (x == 0.0) return 1.0;
  return x * std::log(x) - x + 1.0;
}

RateProfile rate_profile(const DiscreteMeasure& rho, std::span<const double> x_grid) {
  for (std::size_t i = 1; i < x_grid.size(); ++i)
    if (x_grid[i] < x_grid[i - 1]) throw ParameterError("rate_profile needs a sorted grid");
  RateProfile profile;
  profile.measure = rho;
  for (const double x : x_grid) {
    try {
      profile.points.push_back(rate(rho, x));
    } catch (const NoConvergence&) {
      RatePoint p;
      p.x = x;
      p.value = std::numeric_limits<double>::quiet_NaN();
      p.status = RateStatus::NoConvergence;
      p.iterations = kIterationCap;
      profile.points.push_back(p);
    }
  }
  return profile;
}

double rate_infimum(const DiscreteMeasure& rho, double lo, double hi) {
  if (lo > hi) return kInf;
  const double m = rho.mean();
  if (lo <= m && m <= hi) return 0.0;
  const double nearest = hi < m ? hi : lo;
  if (!std::isfinite(nearest)) return kInf;
  return rate(rho, nearest).value;
}

}  // namespace mldp
