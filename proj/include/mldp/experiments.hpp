#ifndef MLDP_EXPERIMENTS_HPP
#define MLDP_EXPERIMENTS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "mldp/additive.hpp"
#include "mldp/exact_model.hpp"
#include "mldp/monoid.hpp"
#include "mldp/prime_systems.hpp"
#include "mldp/rate.hpp"
#include "mldp/report.hpp"

namespace mldp {

// Erdos-Kac ----------------------------------------------------------------

struct EKReport {
  std::uint64_t limit = 0;
  std::uint64_t samples = 0;     // whole table
  std::uint64_t ks_samples = 0;  // elements with norm >= min_norm
  double ks_distance = 0.0;
  Rational mean_omega_exact;
  double mean_omega = 0.0;
  double mertens_mean = 0.0;
  double variance_omega = 0.0;
};

/// Kolmogorov-Smirnov distance between the empirical CDF of `values` and
/// the standard normal CDF. `values` is sorted in place.
double ks_distance_normal(std::vector<double>& values);

/// Standard normal CDF.
double normal_cdf(double t);

EKReport ek_report(const MonoidTable& table, std::uint64_t min_norm = 3);
EKReport ek_report(const PrimeSystem& system, std::uint64_t limit, std::uint64_t min_norm = 3,
                   const ExecutionOptions& options = {});

// Large-deviation tail scan -------------------------------------------------

/// [lo, hi] by default, [lo, hi) when include_hi is false. Infinite ends allowed.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool include_hi = true;

  bool contains(double x) const noexcept {
    return x >= lo && (include_hi ? x <= hi : x < hi);
  }
};

struct LDPRow {
  std::uint64_t limit = 0;
  Interval interval;
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  Rational tail_prob;
  double normalized = 0.0;  // log(tail_prob) / log log X, -inf when 0
  double rate_bound = 0.0;  // -inf_{x in A} I(x)
};

struct LDPReport {
  std::vector<LDPRow> rows;
};

LDPReport ldp_scan(const PrimeSystem& system, const AdditiveFunction& g,
                   std::span<const std::uint64_t> limits, std::span<const Interval> intervals,
                   const DiscreteMeasure& rho, const ExecutionOptions& options = {});

// Condition sweeps ----------------------------------------------------------

struct PrimeCountRow {
  std::uint64_t limit = 0;
  double value = 0.0;
};

struct MertensRow {
  std::uint64_t limit = 0;
  MertensSum mertens;
};

struct SweepReport {
  DensityFit density;
  std::vector<PrimeCountRow> prime_counts;
  std::vector<MertensRow> mertens;
  std::vector<ConvergenceRow> convergence;
  std::vector<Check> checks;
};

/// Thresholds: density FAILED when the fit fails; prime-count WARN when the
/// last value exceeds 1.1x the earlier maximum; Mertens WARN when the
/// deviation moves by >= 0.05 over the last step; convergence WARN unless
/// the last deviation is below the first (or all are ~0).
SweepReport condition_sweep(const PrimeSystem& system, const AdditiveFunction& g,
                            const DiscreteMeasure& rho, std::span<const std::uint64_t> limits,
                            std::span<const double> thetas, const ExecutionOptions& options = {});

struct GapRow {
  GapReport gap;
  double tail = 0.0;
};

struct GapSweep {
  std::vector<GapRow> rows;
  std::vector<Check> checks;
};

GapSweep gap_sweep(const PrimeSystem& system, const AdditiveFunction& g,
                   std::span<const std::uint64_t> limits, double cap, double theta,
                   const ExecutionOptions& options = {});

// Report assembly -----------------------------------------------------------

Report to_report(const EKReport& ek);
Report to_report(const std::vector<EKReport>& rows);
Report to_report(const LDPReport& scan);
Report to_report(const SweepReport& sweep);
Report to_report(const GapSweep& sweep);
Report to_report(const RateProfile& profile);
Report to_report(const DominationReport& report);
Report to_report(const DensityFit& fit);

}  // namespace mldp

#endif  // MLDP_EXPERIMENTS_HPP
