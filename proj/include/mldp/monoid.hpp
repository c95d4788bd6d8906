#ifndef MLDP_MONOID_HPP
#define MLDP_MONOID_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "mldp/additive.hpp"
#include "mldp/execution.hpp"
#include "mldp/prime_systems.hpp"

namespace mldp {

/// A monoid element reduced to the three numbers every statistic needs.
struct MonoidElement {
  std::uint64_t norm = 1;
  std::uint32_t omega = 0;
  double gsum = 0.0;

  friend bool operator==(const MonoidElement&, const MonoidElement&) = default;
};

/// The exact probability space of a uniform element of norm <= limit.
struct MonoidTable {
  PrimeSystem system;
  std::uint64_t limit = 0;
  std::vector<MonoidElement> elements;  // sorted by (norm, omega, gsum)

  std::uint64_t count() const noexcept { return elements.size(); }
};

enum class EnumerationPath { Automatic, Recursive, Sieve };

/// Prefix counts #{m : N(m) <= y} for all y <= limit. Integers use the closed
/// form; other systems fill a norm-indexed table by multiplying in one Euler
/// factor per prime.
class CountingTable {
 public:
  CountingTable(const PrimeSystem& system, std::uint64_t limit,
                const ExecutionOptions& options = {});

  std::uint64_t limit() const noexcept { return limit_; }
  std::uint64_t total() const noexcept { return count(limit_); }

  /// Requires y <= limit().
  std::uint64_t count(std::uint64_t y) const;

 private:
  std::uint64_t limit_;
  bool closed_form_;
  std::vector<std::uint64_t> prefix_;
};

/// Every element of norm <= limit with omega and gsum = sum of g over its
/// distinct prime divisors.
/// Throws BudgetExceeded / OverflowError when `limit` is beyond what the
/// chosen path may enumerate. Called before any prime listing.
void require_enumerable(const PrimeSystem& system, std::uint64_t limit, const ExecutionOptions& options = {},
                        EnumerationPath path = EnumerationPath::Automatic);

MonoidTable enumerate(const PrimeSystem& system, std::uint64_t limit,
                      const AdditiveFunction& g, const ExecutionOptions& options = {},
                      EnumerationPath path = EnumerationPath::Automatic);

/// Same, with g given directly as one value per entry of
/// prime_norms(system, limit). Used to restrict g to a subset of primes.
MonoidTable enumerate_with_values(const PrimeSystem& system, std::uint64_t limit,
                                  std::span<const double> prime_values,
                                  const ExecutionOptions& options = {},
                                  EnumerationPath path = EnumerationPath::Automatic);

enum class Statistic { Omega, GSum };

struct Histogram {
  bool exact = true;   // integer bins; otherwise bins of `width`
  double width = 1.0;
  std::vector<std::pair<double, std::uint64_t>> bins;  // (bin lower edge or value, count)
  std::uint64_t total = 0;
};

/// width == 0 requests exact-integer binning.
Histogram histogram(const MonoidTable& table, Statistic statistic, double width = 0.0);

void write_table_csv(std::ostream& out, const MonoidTable& table);

/// Little-endian cache: 8-byte magic "MLDP0001", u32 version, u32 record
/// count, then per record u64 norm, u32 omega, f64 gsum (20 bytes, packed).
void write_table_binary(const std::filesystem::path& path, const MonoidTable& table);
std::vector<MonoidElement> read_table_binary(const std::filesystem::path& path);

inline constexpr std::uint32_t kTableCacheVersion = 1;

}  // namespace mldp

#endif  // MLDP_MONOID_HPP
