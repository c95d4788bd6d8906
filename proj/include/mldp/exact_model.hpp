#ifndef MLDP_EXACT_MODEL_HPP
#define MLDP_EXACT_MODEL_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "mldp/additive.hpp"
#include "mldp/monoid.hpp"
#include "mldp/prime_systems.hpp"

namespace mldp {

// Exact divisor-indicator side (Z_p over a uniform element of norm <= X)
// against the independent Bernoulli(1/N(p)) surrogates Y_p.

struct ExactExpectation {
  Rational value;
  double float_value = 0.0;
};

/// E[Z_{p1}...Z_{pk}] = #{N(m) <= floor(X / prod N(p_i))} / #{N(m) <= X}.
ExactExpectation expect_Z(const CountingTable& counts, std::span<const PrimeEntry> primes);
ExactExpectation expect_Z(const PrimeSystem& system, std::uint64_t limit,
                          std::span<const PrimeEntry> primes, const ExecutionOptions& options = {});

/// E[Y_{p1}...Y_{pk}] = 1 / prod N(p_i).
ExactExpectation expect_Y(std::span<const PrimeEntry> primes);

struct DominationReport {
  std::uint64_t limit = 0;
  unsigned k_max = 0;
  Rational m_observed;
  double m_observed_float = 0.0;
  std::vector<PrimeEntry> witness;
  std::uint64_t tuples_examined = 0;
};

/// Largest expect_Z / expect_Y over distinct-prime tuples of size <= k_max
/// with norm product <= X. Ties prefer the larger norm product, then the
/// earliest tuple in (norm, label) order.
DominationReport domination_report(const PrimeSystem& system, std::uint64_t limit, unsigned k_max,
                                   const ExecutionOptions& options = {});

struct TruncationSets {
  std::uint64_t limit = 0;
  double cap = 0.0;
  double k_X = 0.0;
  std::vector<PrimeEntry> A;  // k_X < N(p) <= X, |g(p)| <= C
  std::vector<PrimeEntry> B;  // N(p) <= k_X,     |g(p)| <= C
  std::vector<PrimeEntry> T;  // |g(p)| > C
};

/// k_X = exp(log X / (log log X)^2); requires X >= 16.
double truncation_threshold(std::uint64_t limit);

TruncationSets truncation_sets(const PrimeSystem& system, const AdditiveFunction& g,
                               std::uint64_t limit, double cap);

/// A moment generating function value that may have left double range.
/// `log_space` is set once the value exceeds 1e300; `value` is then +inf and
/// only `log_value` is meaningful.
struct MgfValue {
  double value = 1.0;
  double log_value = 0.0;
  bool log_space = false;
};

/// prod_{p in subset} (1 + (e^{theta g(p)} - 1) / N(p)).
MgfValue mgf_Y(std::span<const PrimeEntry> subset, const AdditiveFunction& g, double theta);

/// Average over all m with N(m) <= X of exp(theta * sum_{p in subset, p | m} g(p)).
MgfValue mgf_Z(const PrimeSystem& system, std::uint64_t limit, std::span<const PrimeEntry> subset,
               const AdditiveFunction& g, double theta, const ExecutionOptions& options = {});

struct GapReport {
  std::uint64_t limit = 0;
  double cap = 0.0;
  double theta = 0.0;
  double k_X = 0.0;
  std::size_t b_size = 0;
  MgfValue mgf_z;
  MgfValue mgf_y;
  double gap = 0.0;      // +inf when either side is in log space and they differ
  double log_gap = 0.0;  // log of gap, -inf when gap == 0
};

/// |mgf_Z - mgf_Y| over B(X, C).
GapReport mz9_gap(const PrimeSystem& system, const AdditiveFunction& g, std::uint64_t limit,
                  double cap, double theta, const ExecutionOptions& options = {});

/// sum_{g(p) > C, N(p) <= X} (e^{theta g(p)} - 1) / N(p)  /  sum_{N(p) <= X} 1/N(p).
double tail_mass(const PrimeSystem& system, const AdditiveFunction& g, std::uint64_t limit,
                 double cap, double theta);

}  // namespace mldp

#endif  // MLDP_EXACT_MODEL_HPP
