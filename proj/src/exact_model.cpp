#include "mldp/exact_model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>

#include "mldp/errors.hpp"

namespace mldp {
namespace {

constexpr double kLogSpaceThreshold = 690.7755278982137;  // log(1e300)

// Norm product, or 0 when it exceeds `limit`.
std::uint64_t bounded_product(std::span<const PrimeEntry> primes, std::uint64_t limit) {
  std::uint64_t d = 1;
  for (const auto& p : primes) {
    if (p.norm == 0 || d > limit / p.norm) return 0;
    d *= p.norm;
  }
  return d;
}

void require_distinct(std::span<const PrimeEntry> primes) {
  std::set<std::pair<std::uint64_t, std::string>> seen;
  for (const auto& p : primes)
    if (!seen.insert({p.norm, p.label}).second)
      throw ParameterError("prime '" + p.label + "' listed twice; primes must be distinct");
}

// Indices of `wanted` within `universe` (sorted by (norm, label)).
std::vector<std::size_t> locate(std::span<const PrimeEntry> universe, std::span<const PrimeEntry> wanted,
                                const PrimeSystem& system) {
  std::vector<std::size_t> out;
  for (const auto& p : wanted) {
    const auto it = std::lower_bound(universe.begin(), universe.end(), p);
    if (it == universe.end() || *it != p) {
      throw PrimeNotInSystem("prime '" + p.label + "' of norm " + std::to_string(p.norm) +
                             " is not a prime of " + system.spec() + " within the limit");
    }
    out.push_back(static_cast<std::size_t>(it - universe.begin()));
  }
  return out;
}

ExactExpectation make_expectation(Rational value) {
  value.canonicalize();
  ExactExpectation e;
  e.float_value = to_double(value);
  e.value = std::move(value);
  return e;
}

double log_factor(double theta_g, std::uint64_t norm) {
  const double n = static_cast<double>(norm);
  if (theta_g <= kLogSpaceThreshold) return std::log1p(std::expm1(theta_g) / n);
  return theta_g - std::log(n) + std::log1p((n - 1.0) * std::exp(-theta_g));
}

MgfValue from_log(double log_value) {
  MgfValue v;
  v.log_value = log_value;
  v.log_space = log_value > kLogSpaceThreshold;
  v.value = v.log_space ? std::numeric_limits<double>::infinity() : std::exp(log_value);
  return v;
}

}  // namespace

// Expectations --------------------------------------------------------------

ExactExpectation expect_Z(const CountingTable& counts, std::span<const PrimeEntry> primes) {
  require_distinct(primes);
  const std::uint64_t limit = counts.limit();
  const std::uint64_t d = bounded_product(primes, limit);
  if (d == 0) return make_expectation(Rational(0));
  const std::uint64_t total = counts.total();
  if (total == 0) throw EmptySystem("no monoid element of norm <= limit");
  Rational value;
  mpz_set_ui(value.get_num_mpz_t(), counts.count(limit / d));
  mpz_set_ui(value.get_den_mpz_t(), total);
  return make_expectation(std::move(value));
}

ExactExpectation expect_Z(const PrimeSystem& system, std::uint64_t limit, std::span<const PrimeEntry> primes,
                          const ExecutionOptions& options) {
  if (limit < 1) throw ParameterError("expect_Z needs X >= 1");
  require_enumerable(system, limit, options, EnumerationPath::Recursive);
  std::uint64_t top = limit;
  for (const auto& p : primes) top = std::max(top, p.norm);
  const auto universe = list_primes(system, top);
  locate(universe, primes, system);
  return expect_Z(CountingTable(system, limit, options), primes);
}

ExactExpectation expect_Y(std::span<const PrimeEntry> primes) {
  require_distinct(primes);
  mpz_class d = 1;
  for (const auto& p : primes) d *= static_cast<unsigned long>(p.norm);
  return make_expectation(Rational(mpz_class(1), d));
}

DominationReport domination_report(const PrimeSystem& system, std::uint64_t limit, unsigned k_max,
                                   const ExecutionOptions& options) {
  if (k_max < 1) throw ParameterError("domination_report needs k_max >= 1");
  if (limit < 1) throw ParameterError("domination_report needs X >= 1");
  require_enumerable(system, limit, options, EnumerationPath::Recursive);
  const auto primes = list_primes(system, limit);
  const CountingTable counts(system, limit, options);
  const std::uint64_t total = counts.total();

  // ratio = count(X / d) * d / total; compare the numerators.
  struct Best {
    unsigned __int128 score = 0;
    std::uint64_t product = 0;
    std::vector<std::size_t> tuple;
    std::uint64_t examined = 0;
  };
  std::atomic<std::uint64_t> examined{0};
  const std::uint64_t max_tuples = options.budget.max_tuples;

  auto better = [](const Best& current, unsigned __int128 score, std::uint64_t product) {
    if (score != current.score) return score > current.score;
    return product > current.product;
  };

  std::vector<Best> per_first(primes.size());
  parallel_for(primes.size(), options.resolved_threads(), [&](std::size_t first) {
    Best& best = per_first[first];
    std::vector<std::size_t> stack{first};
    auto visit = [&](auto&& self, std::uint64_t d) -> void {
      ++best.examined;
      if ((best.examined & 0x3FF) == 0 && examined.fetch_add(0x400) + 0x400 > max_tuples)
        throw BudgetExceeded("domination_report exceeded the tuple budget of " + std::to_string(max_tuples));
      const unsigned __int128 score = static_cast<unsigned __int128>(counts.count(limit / d)) * d;
      if (best.tuple.empty() || better(best, score, d)) {
        best.score = score;
        best.product = d;
        best.tuple = stack;
      }
      if (stack.size() == k_max) return;
      for (std::size_t j = stack.back() + 1; j < primes.size(); ++j) {
        if (d > limit / primes[j].norm) break;
        stack.push_back(j);
        self(self, d * primes[j].norm);
        stack.pop_back();
      }
    };
    visit(visit, primes[first].norm);
  });

  DominationReport report;
  report.limit = limit;
  report.k_max = k_max;
  Best overall;
  for (const auto& b : per_first) {
    report.tuples_examined += b.examined;
    if (b.tuple.empty()) continue;
    if (overall.tuple.empty() || better(overall, b.score, b.product)) overall = b;
  }
  if (report.tuples_examined > max_tuples)
    throw BudgetExceeded("domination_report exceeded the tuple budget of " + std::to_string(max_tuples));

  if (!overall.tuple.empty()) {
    mpz_class num;
    const auto hi = static_cast<std::uint64_t>(overall.score >> 64);
    const auto lo = static_cast<std::uint64_t>(overall.score);
    num = mpz_class(static_cast<unsigned long>(hi));
    num <<= 64;
    num += mpz_class(static_cast<unsigned long>(lo));
    report.m_observed = Rational(num, mpz_class(static_cast<unsigned long>(total)));
    report.m_observed.canonicalize();
    for (const auto i : overall.tuple) report.witness.push_back(primes[i]);
  }
  report.m_observed_float = to_double(report.m_observed);
  return report;
}

// Truncation ----------------------------------------------------------------

double truncation_threshold(std::uint64_t limit) {
  if (limit < 16) throw ParameterError("truncation needs X >= 16 so that log log X > 1");
  const double log_x = std::log(static_cast<double>(limit));
  const double loglog = std::log(log_x);
  return std::exp(log_x / (loglog * loglog));
}

TruncationSets truncation_sets(const PrimeSystem& system, const AdditiveFunction& g, std::uint64_t limit,
                               double cap) {
  TruncationSets sets;
  sets.limit = limit;
  sets.cap = cap;
  sets.k_X = truncation_threshold(limit);
  for (auto& p : list_primes(system, limit)) {
    const double v = g(p);
    if (std::abs(v) > cap) sets.T.push_back(std::move(p));
    else if (static_cast<double>(p.norm) <= sets.k_X) sets.B.push_back(std::move(p));
    else sets.A.push_back(std::move(p));
  }
  return sets;
}

// Moment generating functions -----------------------------------------------

MgfValue mgf_Y(std::span<const PrimeEntry> subset, const AdditiveFunction& g, double theta) {
  double product = 1.0;
  double log_sum = 0.0;
  for (const auto& p : subset) {
    const double tg = theta * g(p);
    if (tg == 0.0) continue;
    log_sum += log_factor(tg, p.norm);
    product *= 1.0 + std::expm1(tg) / static_cast<double>(p.norm);
  }
  if (std::isfinite(product) && product <= 1e300) {
    MgfValue v;
    v.value = product;
    v.log_value = log_sum;
    return v;
  }
  return from_log(log_sum);
}

MgfValue mgf_Z(const PrimeSystem& system, std::uint64_t limit, std::span<const PrimeEntry> subset,
               const AdditiveFunction& g, double theta, const ExecutionOptions& options) {
  require_distinct(subset);
  require_enumerable(system, limit, options);
  const auto universe = list_primes(system, limit);
  std::vector<double> values(universe.size(), 0.0);
  for (const auto i : locate(universe, subset, system)) values[i] = g(universe[i]);

  const MonoidTable table = enumerate_with_values(system, limit, values, options);
  if (table.elements.empty()) throw EmptySample("no monoid element of norm <= " + std::to_string(limit));
  const double count = static_cast<double>(table.count());

  double top = 0.0;
  for (const auto& e : table.elements) top = std::max(top, theta * e.gsum);

  if (top + std::log(count) < kLogSpaceThreshold) {
    // Neumaier summation in table order keeps the result thread-independent.
    double sum = 0.0, compensation = 0.0;
    for (const auto& e : table.elements) {
      const double term = theta * e.gsum == 0.0 ? 1.0 : std::exp(theta * e.gsum);
      const double t = sum + term;
      compensation += std::abs(sum) >= term ? (sum - t) + term : (term - t) + sum;
      sum = t;
    }
    MgfValue v;
    v.value = (sum + compensation) / count;
    v.log_value = std::log(v.value);
    return v;
  }

  double sum = 0.0;
  for (const auto& e : table.elements) sum += std::exp(theta * e.gsum - top);
  return from_log(top + std::log(sum) - std::log(count));
}

GapReport mz9_gap(const PrimeSystem& system, const AdditiveFunction& g, std::uint64_t limit, double cap,
                  double theta, const ExecutionOptions& options) {
  require_enumerable(system, limit, options);
  const TruncationSets sets = truncation_sets(system, g, limit, cap);
  GapReport r;
  r.limit = limit;
  r.cap = cap;
  r.theta = theta;
  r.k_X = sets.k_X;
  r.b_size = sets.B.size();
  if (!sets.B.empty()) {
    r.mgf_z = mgf_Z(system, limit, sets.B, g, theta, options);
    r.mgf_y = mgf_Y(sets.B, g, theta);
  }

  if (!r.mgf_z.log_space && !r.mgf_y.log_space) {
    r.gap = std::abs(r.mgf_z.value - r.mgf_y.value);
    r.log_gap = r.gap == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(r.gap);
    return r;
  }
  const double hi = std::max(r.mgf_z.log_value, r.mgf_y.log_value);
  const double lo = std::min(r.mgf_z.log_value, r.mgf_y.log_value);
  if (hi == lo) {
    r.gap = 0.0;
    r.log_gap = -std::numeric_limits<double>::infinity();
  } else {
    r.log_gap = hi + std::log1p(-std::exp(lo - hi));
    r.gap = r.log_gap > kLogSpaceThreshold ? std::numeric_limits<double>::infinity() : std::exp(r.log_gap);
  }
  return r;
}

double tail_mass(const PrimeSystem& system, const AdditiveFunction& g, std::uint64_t limit, double cap,
                 double theta) {
  if (theta < 0.0) throw ParameterError("tail_mass needs theta >= 0");
  double numerator = 0.0, denominator = 0.0;
  for (const auto n : prime_norms(system, limit)) {
    const double inv = 1.0 / static_cast<double>(n);
    denominator += inv;
    const double v = g.value(n);
    if (v > cap) numerator += std::expm1(theta * v) * inv;
  }
  return denominator == 0.0 ? 0.0 : numerator / denominator;
}

}  // namespace mldp
