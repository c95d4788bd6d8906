#ifndef MLDP_PRIME_SYSTEMS_HPP
#define MLDP_PRIME_SYSTEMS_HPP

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mldp/execution.hpp"

namespace mldp {

/// One generalized prime: its norm (>= 2) and a label unique within its system.
struct PrimeEntry {
  std::uint64_t norm = 0;
  std::string label;

  auto operator<=>(const PrimeEntry&) const = default;
};

enum class SystemKind { Integers, PolyOverFq, QuadraticField, Beurling };

/// A generator of prime norms. The monoid is whatever these primes generate
/// freely; everything downstream only ever asks for "all primes of norm <= X".
///
/// Supported parameters: q a prime power <= 9, D a fundamental discriminant
/// with |D| <= 100. Beurling systems are read eagerly so that a bad file
/// fails at construction.
class PrimeSystem {
 public:
  static PrimeSystem integers();
  static PrimeSystem poly_over_fq(unsigned q);
  static PrimeSystem quadratic_field(int discriminant);
  static PrimeSystem beurling_file(const std::filesystem::path& path);
  static PrimeSystem beurling(std::vector<std::uint64_t> norms);

  /// Parses `integers`, `poly:Q`, `quad:D`, `beurling:PATH` or
  /// `beurling-list:N1,N2,...`.
  static PrimeSystem parse(std::string_view spec);

  SystemKind kind() const noexcept { return kind_; }
  unsigned q() const noexcept { return q_; }
  int discriminant() const noexcept { return discriminant_; }

  /// Sorted Beurling norms (empty for other kinds).
  std::span<const std::uint64_t> beurling_norms() const noexcept;

  /// Inverse of parse().
  std::string spec() const;

 private:
  PrimeSystem() = default;

  SystemKind kind_ = SystemKind::Integers;
  unsigned q_ = 0;
  int discriminant_ = 0;
  std::string source_;
  std::shared_ptr<const std::vector<std::uint64_t>> norms_;
};

/// Status of a density fit: Ok (b_hat in [0,1)), Exact (all residuals zero)
/// or Failed (Condition-1 style linear growth is not supported by the data).
enum class FitStatus { Ok, Exact, Failed };

const char* to_string(FitStatus status) noexcept;

struct DensityResidual {
  std::uint64_t threshold = 0;
  std::uint64_t count = 0;
  double residual = 0.0;  // count - a_hat * threshold
};

struct DensityFit {
  double a_hat = 0.0;
  double b_hat = 0.0;
  double growth_exponent = 0.0;  // slope of log count vs log X
  FitStatus status = FitStatus::Ok;
  std::vector<DensityResidual> residuals;
  std::vector<std::uint64_t> grid;
  std::vector<std::uint64_t> unsupported;  // thresholds skipped (not q^n)
};

struct MertensSum {
  double sum = 0.0;
  double deviation = 0.0;  // sum - log log X
};

// Prime enumeration -------------------------------------------------------

std::vector<PrimeEntry> list_primes(const PrimeSystem& system, std::uint64_t limit);

/// Norms of list_primes(system, limit), in the same order, without labels.
std::vector<std::uint64_t> prime_norms(const PrimeSystem& system, std::uint64_t limit);

/// Rational primes <= limit (segmented, odd-only sieve).
std::vector<std::uint64_t> sieve_primes(std::uint64_t limit);

std::uint64_t necklace_count(std::uint64_t q, unsigned n);

int kronecker_symbol(int discriminant, std::uint64_t p);
bool is_fundamental_discriminant(int discriminant);

// Condition checks ----------------------------------------------------------

/// Number of monoid elements (identity included) of norm <= limit.
std::uint64_t count_elements(const PrimeSystem& system, std::uint64_t limit,
                             const ExecutionOptions& options = {});

DensityFit density_fit(const PrimeSystem& system,
                       std::span<const std::uint64_t> grid,
                       const ExecutionOptions& options = {});

/// pi_P(X) * log X / X.
double prime_count_check(const PrimeSystem& system, std::uint64_t limit);

MertensSum mertens_sum(const PrimeSystem& system, std::uint64_t limit);

/// True when `limit` is a threshold at which PolyOverFq counts are meaningful
/// (a power of q); always true for other systems.
bool is_supported_threshold(const PrimeSystem& system, std::uint64_t limit);

void write_primes_csv(std::ostream& out, std::span<const PrimeEntry> primes);

}  // namespace mldp

#endif  // MLDP_PRIME_SYSTEMS_HPP
