#ifndef MLDP_ADDITIVE_HPP
#define MLDP_ADDITIVE_HPP

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "mldp/prime_systems.hpp"

namespace mldp {

using Rational = mpq_class;

/// Strongly additive g, given by its values on primes. Values are finite and
/// non-negative.
class AdditiveFunction {
 public:
  struct Omega {};
  struct NormResidue {
    std::uint64_t modulus = 1;
    std::set<std::uint64_t> residues;
    double value_in = 1.0;
    double value_out = 0.0;
  };
  struct TableLookup {
    std::map<std::uint64_t, double> values;
    double fallback = 0.0;
  };

  static AdditiveFunction omega();
  static AdditiveFunction norm_residue(std::uint64_t modulus, std::set<std::uint64_t> residues,
                                       double value_in, double value_out);
  static AdditiveFunction table_lookup(std::map<std::uint64_t, double> values, double fallback);

  /// Parses `omega` or `residue:M:R1/R2/...:VIN:VOUT`.
  static AdditiveFunction parse(std::string_view spec);

  double operator()(const PrimeEntry& prime) const { return value(prime.norm); }
  double value(std::uint64_t norm) const;

  bool is_omega() const noexcept { return std::holds_alternative<Omega>(rule_); }

  /// Inverse of parse() for the parseable rules; table lookups describe
  /// themselves as `table:N=V,...;default=V`.
  std::string spec() const;

  std::vector<double> values_for(std::span<const std::uint64_t> norms) const;

 private:
  explicit AdditiveFunction(std::variant<Omega, NormResidue, TableLookup> rule);
  std::variant<Omega, NormResidue, TableLookup> rule_;
};

struct Atom {
  double y = 0.0;
  double w = 0.0;
};

/// Finite probability measure on R: positive weights summing to 1 within
/// 1e-12, atoms sorted by y with no duplicates.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  /// Sorts and validates; duplicate y values are an error.
  explicit DiscreteMeasure(std::vector<Atom> atoms);

  static DiscreteMeasure delta(double y);
  static DiscreteMeasure from_json(const nlohmann::json& doc);
  static DiscreteMeasure load(const std::string& path_or_alias);  // "delta1" or a JSON file

  nlohmann::json to_json() const;

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  bool empty() const noexcept { return atoms_.empty(); }
  double mean() const;
  double min_support() const;
  double max_support() const;

 private:
  std::vector<Atom> atoms_;
};

struct EmpiricalMeasure {
  DiscreteMeasure base;
  std::uint64_t limit = 0;
  double denominator = 0.0;            // Mertens sum at limit
  std::vector<Rational> exact_weights; // aligned with base.atoms()
};

/// rho_X: each distinct g(p) value weighted by sum 1/N(p), normalised by the
/// full reciprocal sum. Weights are summed exactly before conversion.
EmpiricalMeasure rho_X(const PrimeSystem& system, const AdditiveFunction& g, std::uint64_t limit);

/// sum_atoms w e^{theta y}
double exp_moment(const DiscreteMeasure& measure, double theta);

struct ConvergenceRow {
  std::uint64_t limit = 0;
  double theta = 0.0;
  double empirical = 0.0;
  double limiting = 0.0;
  double deviation = 0.0;
};

std::vector<ConvergenceRow> check_convergence(const PrimeSystem& system, const AdditiveFunction& g,
                                              const DiscreteMeasure& rho,
                                              std::span<const double> thetas,
                                              std::span<const std::uint64_t> limits);

/// Exact sum of 1/n over `norms` (with multiplicity), by binary splitting.
/// Nearest double (ties to even); mpq_class::get_d truncates.
double to_double(const Rational& value);

Rational reciprocal_sum(std::span<const std::uint64_t> norms);

}  // namespace mldp

#endif  // MLDP_ADDITIVE_HPP
