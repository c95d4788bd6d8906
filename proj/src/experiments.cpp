#include "mldp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mldp/errors.hpp"

namespace mldp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string rational_string(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  return c.get_str();
}

double loglog(std::uint64_t limit) {
  if (limit < 3) throw ParameterError("log log X needs X >= 3");
  return std::log(std::log(static_cast<double>(limit)));
}

}  // namespace

// Erdos-Kac -----------------------------------------------------------------

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

double ks_distance_normal(std::vector<double>& values) {
  if (values.empty()) throw EmptySample("KS distance of an empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double cdf = normal_cdf(values[i]);
    d = std::max(d, static_cast<double>(i + 1) / n - cdf);
    d = std::max(d, cdf - static_cast<double>(i) / n);
  }
  return std::min(1.0, d);
}

EKReport ek_report(const MonoidTable& table, std::uint64_t min_norm) {
  if (min_norm < 3) throw ParameterError("min_norm must be >= 3 so that log log N(m) > 0");
  EKReport r;
  r.limit = table.limit;
  r.samples = table.count();
  if (r.samples == 0) throw EmptySample("empty table");

  mpz_class omega_total = 0;
  std::uint64_t running = 0;
  std::vector<double> stats;
  for (const auto& e : table.elements) {
    running += e.omega;
    if (e.norm >= min_norm) {
      const double l = std::log(std::log(static_cast<double>(e.norm)));
      stats.push_back((static_cast<double>(e.omega) - l) / std::sqrt(l));
    }
  }
  if (stats.empty())
    throw EmptySample("no element of norm >= " + std::to_string(min_norm) + " below X = " +
                      std::to_string(table.limit));
  mpz_set_ui(omega_total.get_mpz_t(), running);

  r.mean_omega_exact = Rational(omega_total, mpz_class(static_cast<unsigned long>(r.samples)));
  r.mean_omega_exact.canonicalize();
  r.mean_omega = to_double(r.mean_omega_exact);
  double var = 0.0;
  for (const auto& e : table.elements) {
    const double d = static_cast<double>(e.omega) - r.mean_omega;
    var += d * d;
  }
  r.variance_omega = var / static_cast<double>(r.samples);
  r.ks_samples = stats.size();
  r.ks_distance = ks_distance_normal(stats);
  r.mertens_mean = table.limit >= 3 ? mertens_sum(table.system, table.limit).sum : 0.0;
  return r;
}

EKReport ek_report(const PrimeSystem& system, std::uint64_t limit, std::uint64_t min_norm,
                   const ExecutionOptions& options) {
  if (limit < 16) throw ParameterError("ek_report needs X >= 16");
  return ek_report(enumerate(system, limit, AdditiveFunction::omega(), options), min_norm);
}

// LDP scan ------------------------------------------------------------------

LDPReport ldp_scan(const PrimeSystem& system, const AdditiveFunction& g, std::span<const std::uint64_t> limits,
                   std::span<const Interval> intervals, const DiscreteMeasure& rho,
                   const ExecutionOptions& options) {
  if (limits.empty() || intervals.empty()) throw ParameterError("ldp_scan needs limits and intervals");
  std::vector<double> bounds;
  for (const auto& a : intervals) bounds.push_back(-rate_infimum(rho, a.lo, a.hi));

  LDPReport report;
  for (const auto limit : limits) {
    const double scale = loglog(limit);
    const MonoidTable table = enumerate(system, limit, g, options);
    std::vector<double> scaled;
    scaled.reserve(table.elements.size());
    for (const auto& e : table.elements) scaled.push_back(e.gsum / scale);

    for (std::size_t k = 0; k < intervals.size(); ++k) {
      const Interval& a = intervals[k];
      LDPRow row;
      row.limit = limit;
      row.interval = a;
      row.total = table.count();
      row.hits = static_cast<std::uint64_t>(std::count_if(scaled.begin(), scaled.end(),
                                                          [&](double x) { return a.contains(x); }));
      row.tail_prob = Rational(mpz_class(static_cast<unsigned long>(row.hits)),
                               mpz_class(static_cast<unsigned long>(row.total)));
      row.tail_prob.canonicalize();
      row.normalized = row.hits == 0 ? -kInf
                                     : (std::log(static_cast<double>(row.hits)) -
                                        std::log(static_cast<double>(row.total))) / scale;
      row.rate_bound = bounds[k];
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

// Sweeps --------------------------------------------------------------------

SweepReport condition_sweep(const PrimeSystem& system, const AdditiveFunction& g, const DiscreteMeasure& rho,
                            std::span<const std::uint64_t> limits, std::span<const double> thetas,
                            const ExecutionOptions& options) {
  if (limits.empty() || thetas.empty()) throw ParameterError("condition_sweep needs nonempty grids");
  SweepReport s;

  try {
    s.density = density_fit(system, limits, options);
    const bool ok = s.density.status != FitStatus::Failed;
    s.checks.push_back({"density", ok ? Flag::Pass : Flag::Failed,
                        std::string(to_string(s.density.status)) + " a_hat=" + format_number(s.density.a_hat) +
                            " b_hat=" + format_number(s.density.b_hat) +
                            " growth=" + format_number(s.density.growth_exponent)});
  } catch (const EmptySystem&) {
    throw;
  } catch (const Error& e) {
    s.density.status = FitStatus::Failed;
    s.checks.push_back({"density", Flag::Failed, e.what()});
  }

  std::vector<std::uint64_t> usable;
  for (const auto x : limits)
    if (x >= 3 && is_supported_threshold(system, x)) usable.push_back(x);

  for (const auto x : usable) {
    s.prime_counts.push_back({x, prime_count_check(system, x)});
    s.mertens.push_back({x, mertens_sum(system, x)});
  }

  if (s.prime_counts.size() >= 2) {
    double earlier = 0.0;
    for (std::size_t i = 0; i + 1 < s.prime_counts.size(); ++i) earlier = std::max(earlier, s.prime_counts[i].value);
    const double last = s.prime_counts.back().value;
    s.checks.push_back({"prime_count", last <= 1.1 * earlier ? Flag::Pass : Flag::Warn,
                        "last=" + format_number(last) + " earlier_max=" + format_number(earlier)});
  } else {
    s.checks.push_back({"prime_count", Flag::Warn, "fewer than two usable thresholds"});
  }

  if (s.mertens.size() >= 2) {
    const double step = std::abs(s.mertens.back().mertens.deviation - s.mertens[s.mertens.size() - 2].mertens.deviation);
    s.checks.push_back({"mertens", step < 0.05 ? Flag::Pass : Flag::Warn, "last_step=" + format_number(step)});
  } else {
    s.checks.push_back({"mertens", Flag::Warn, "fewer than two usable thresholds"});
  }

  s.convergence = check_convergence(system, g, rho, thetas, usable.empty() ? limits : usable);
  for (const double theta : thetas) {
    std::vector<double> devs;
    for (const auto& row : s.convergence)
      if (row.theta == theta) devs.push_back(row.deviation);
    const bool flat = std::all_of(devs.begin(), devs.end(), [](double d) { return d <= 1e-12; });
    const bool decays = devs.size() >= 2 && devs.back() < devs.front();
    s.checks.push_back({"convergence theta=" + format_number(theta), flat || decays ? Flag::Pass : Flag::Warn,
                        "first=" + format_number(devs.front()) + " last=" + format_number(devs.back())});
  }
  return s;
}

GapSweep gap_sweep(const PrimeSystem& system, const AdditiveFunction& g, std::span<const std::uint64_t> limits,
                   double cap, double theta, const ExecutionOptions& options) {
  if (limits.empty()) throw ParameterError("gap_sweep needs a nonempty grid");
  GapSweep sweep;
  bool empty_b = false;
  for (const auto x : limits) {
    GapRow row;
    row.gap = mz9_gap(system, g, x, cap, theta, options);
    row.tail = theta >= 0.0 ? tail_mass(system, g, x, cap, theta) : std::numeric_limits<double>::quiet_NaN();
    empty_b = empty_b || row.gap.b_size == 0;
    sweep.rows.push_back(row);
  }
  if (empty_b) sweep.checks.push_back({"truncation", Flag::Warn, "B(X,C) is empty at some X; gaps are trivially 0"});

  bool all_zero = true, decreasing = true;
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    all_zero = all_zero && sweep.rows[i].gap.gap == 0.0;
    if (i > 0) decreasing = decreasing && sweep.rows[i].gap.log_gap < sweep.rows[i - 1].gap.log_gap;
  }
  sweep.checks.push_back({"gap_decreasing", all_zero || decreasing ? Flag::Pass : Flag::Warn,
                          all_zero ? "all gaps are 0" : (decreasing ? "strictly decreasing" : "not strictly decreasing")});
  return sweep;
}

// Reports -------------------------------------------------------------------

Report to_report(const std::vector<EKReport>& rows) {
  Report r;
  r.command = "ek";
  ReportTable t{"ek", {"X", "samples", "ks_samples", "ks_distance", "mean_omega", "mertens_mean", "variance_omega"}, {}};
  for (const auto& ek : rows) {
    t.rows.push_back({ek.limit, ek.samples, ek.ks_samples, ek.ks_distance, ek.mean_omega, ek.mertens_mean,
                      ek.variance_omega});
  }
  r.tables.push_back(std::move(t));
  if (rows.size() >= 2) {
    const bool down = rows.back().ks_distance < rows.front().ks_distance;
    r.checks.push_back({"ks_trend", down ? Flag::Pass : Flag::Warn,
                        "first=" + format_number(rows.front().ks_distance) +
                            " last=" + format_number(rows.back().ks_distance)});
  }
  return r;
}

Report to_report(const EKReport& ek) { return to_report(std::vector<EKReport>{ek}); }

Report to_report(const LDPReport& scan) {
  Report r;
  r.command = "ldp-scan";
  ReportTable t{"ldp",
                {"X", "x_lo", "x_hi", "hits", "total", "tail_prob", "tail_prob_float", "normalized", "rate_bound"},
                {}};
  for (const auto& row : scan.rows) {
    t.rows.push_back({row.limit, row.interval.lo, row.interval.hi, row.hits, row.total,
                      rational_string(row.tail_prob), to_double(row.tail_prob), row.normalized, row.rate_bound});
  }
  r.tables.push_back(std::move(t));
  return r;
}

Report to_report(const SweepReport& s) {
  Report r;
  r.command = "sweep";
  ReportTable density{"density", {"X", "count", "residual"}, {}};
  for (const auto& d : s.density.residuals) density.rows.push_back({d.threshold, d.count, d.residual});
  ReportTable summary{"density_summary", {"a_hat", "b_hat", "growth_exponent", "status", "unsupported"}, {}};
  std::string unsupported;
  for (const auto x : s.density.unsupported) unsupported += (unsupported.empty() ? "" : ";") + std::to_string(x);
  summary.rows.push_back({s.density.a_hat, s.density.b_hat, s.density.growth_exponent,
                          std::string(to_string(s.density.status)), unsupported});
  ReportTable primes{"prime_count", {"X", "value"}, {}};
  for (const auto& p : s.prime_counts) primes.rows.push_back({p.limit, p.value});
  ReportTable mertens{"mertens", {"X", "sum", "deviation"}, {}};
  for (const auto& m : s.mertens) mertens.rows.push_back({m.limit, m.mertens.sum, m.mertens.deviation});
  ReportTable conv{"convergence", {"X", "theta", "empirical", "limiting", "deviation"}, {}};
  for (const auto& c : s.convergence) conv.rows.push_back({c.limit, c.theta, c.empirical, c.limiting, c.deviation});
  r.tables = {density, summary, primes, mertens, conv};
  r.checks = s.checks;
  return r;
}

Report to_report(const GapSweep& sweep) {
  Report r;
  r.command = "mgf-gap";
  ReportTable gaps{"gap", {"X", "C", "theta", "mgf_Z", "mgf_Y", "gap"}, {}};
  ReportTable tails{"tail_mass", {"X", "C", "theta", "tail_mass"}, {}};
  for (const auto& row : sweep.rows) {
    const auto& g = row.gap;
    // Values beyond double range are reported as log-values with a "log:" prefix.
    auto cell = [](const MgfValue& v) -> Cell {
      if (v.log_space) return "log:" + format_number(v.log_value);
      return v.value;
    };
    Cell gap_cell = g.gap;
    if (!std::isfinite(g.gap)) gap_cell = "log:" + format_number(g.log_gap);
    gaps.rows.push_back({g.limit, g.cap, g.theta, cell(g.mgf_z), cell(g.mgf_y), gap_cell});
    tails.rows.push_back({g.limit, g.cap, g.theta, row.tail});
  }
  r.tables = {gaps, tails};
  r.checks = sweep.checks;
  return r;
}

Report to_report(const RateProfile& profile) {
  Report r;
  r.command = "rate";
  ReportTable t{"rate", {"x", "I", "theta_star", "iters", "status"}, {}};
  for (const auto& p : profile.points) {
    Cell theta = std::string("");
    if (p.theta_star) theta = *p.theta_star;
    else if (p.status == RateStatus::SaturatedLeft) theta = -kInf;
    else if (p.status == RateStatus::SaturatedRight) theta = kInf;
    t.rows.push_back({p.x, p.value, theta, static_cast<std::uint64_t>(p.iterations), std::string(to_string(p.status))});
    if (p.status == RateStatus::NoConvergence)
      r.checks.push_back({"rate x=" + format_number(p.x), Flag::Failed, "solver hit the iteration cap"});
  }
  r.tables.push_back(std::move(t));
  return r;
}

Report to_report(const DominationReport& d) {
  Report r;
  r.command = "dominate";
  std::string witness;
  for (const auto& p : d.witness) witness += (witness.empty() ? "" : ";") + p.label;
  ReportTable t{"dominate", {"X", "k_max", "M_observed", "witness"}, {}};
  t.rows.push_back({d.limit, static_cast<std::uint64_t>(d.k_max), d.m_observed_float, witness});
  r.tables.push_back(std::move(t));
  return r;
}

Report to_report(const DensityFit& fit) {
  SweepReport s;
  s.density = fit;
  Report full = to_report(s);
  Report r;
  r.command = "density";
  r.tables = {full.tables[0], full.tables[1]};
  r.checks.push_back({"density", fit.status == FitStatus::Failed ? Flag::Failed : Flag::Pass,
                      std::string(to_string(fit.status))});
  return r;
}

}  // namespace mldp
