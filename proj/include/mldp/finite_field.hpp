#ifndef MLDP_FINITE_FIELD_HPP
#define MLDP_FINITE_FIELD_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace mldp {

/// Table-driven GF(q) for prime powers q <= 9. Elements are the integers
/// 0..q-1; for q = p^k an element encodes a polynomial over F_p in base p,
/// reduced modulo a fixed irreducible (x^2+x+1, x^3+x+1, x^2+1).
class FiniteField {
 public:
  explicit FiniteField(unsigned q);

  unsigned order() const noexcept { return q_; }
  unsigned characteristic() const noexcept { return p_; }

  std::uint8_t add(std::uint8_t a, std::uint8_t b) const noexcept { return add_[a * q_ + b]; }
  std::uint8_t sub(std::uint8_t a, std::uint8_t b) const noexcept { return sub_[a * q_ + b]; }
  std::uint8_t mul(std::uint8_t a, std::uint8_t b) const noexcept { return mul_[a * q_ + b]; }
  std::uint8_t neg(std::uint8_t a) const noexcept { return sub_[a]; }
  std::uint8_t inv(std::uint8_t a) const;

  static bool is_supported(unsigned q) noexcept;

 private:
  unsigned q_;
  unsigned p_;
  std::vector<std::uint8_t> add_, sub_, mul_;
};

/// A monic polynomial of degree `degree` over GF(q) stored by the base-q code
/// of its lower coefficients: code = sum_{i<degree} c_i q^i.
struct MonicPoly {
  unsigned degree = 0;
  std::uint64_t code = 0;
};

/// Coefficients c_0..c_degree (leading 1 included) of a monic polynomial.
std::vector<std::uint8_t> coefficients(const MonicPoly& poly, unsigned q);

/// Human-readable form, e.g. "t^3+t+1"; for q in {4,8,9} non-prime-field
/// coefficients print as "{c}".
std::string format_poly(const MonicPoly& poly, unsigned q);

/// All monic irreducibles of each degree 1..max_degree, in code order.
/// Reducible polynomials are crossed out by stepping through f*h for every
/// irreducible f of degree <= d/2 and every monic h, one odometer digit at a
/// time, so each marked product costs O(deg f).
std::vector<std::vector<std::uint64_t>> irreducible_codes(const FiniteField& field,
                                                          unsigned max_degree);

}  // namespace mldp

#endif  // MLDP_FINITE_FIELD_HPP
