#include "mldp/finite_field.hpp"

#include <array>

#include "mldp/errors.hpp"

namespace mldp {
namespace {

struct FieldShape {
  unsigned p;
  unsigned k;
  // Lower coefficients of the monic modulus of degree k (base-p digits).
  std::array<unsigned, 3> modulus_low;
};

bool shape_of(unsigned q, FieldShape& shape) {
  switch (q) {
    case 2: case 3: case 5: case 7:
      shape = {q, 1, {0, 0, 0}};
      return true;
    case 4:  // x^2 + x + 1
      shape = {2, 2, {1, 1, 0}};
      return true;
    case 8:  // x^3 + x + 1
      shape = {2, 3, {1, 1, 0}};
      return true;
    case 9:  // x^2 + 1
      shape = {3, 2, {1, 0, 0}};
      return true;
    default:
      return false;
  }
}

}  // namespace

bool FiniteField::is_supported(unsigned q) noexcept {
  FieldShape shape{};
  return shape_of(q, shape);
}

FiniteField::FiniteField(unsigned q) : q_(q) {
  FieldShape shape{};
  if (!shape_of(q, shape)) {
    throw ParameterError("unsupported field order q = " + std::to_string(q) +
                         " (prime powers <= 9 only)");
  }
  p_ = shape.p;
  const unsigned k = shape.k;

  auto digits = [&](unsigned a) {
    std::array<unsigned, 3> d{};
    for (unsigned i = 0; i < k; ++i) {
      d[i] = a % p_;
      a /= p_;
    }
    return d;
  };
  auto pack = [&](const std::array<unsigned, 3>& d) {
    unsigned a = 0;
    for (unsigned i = k; i-- > 0;) a = a * p_ + d[i];
    return a;
  };

  add_.resize(q * q);
  sub_.resize(q * q);
  mul_.resize(q * q);
  for (unsigned a = 0; a < q; ++a) {
    for (unsigned b = 0; b < q; ++b) {
      const auto da = digits(a);
      const auto db = digits(b);
      std::array<unsigned, 3> s{}, d{};
      for (unsigned i = 0; i < k; ++i) {
        s[i] = (da[i] + db[i]) % p_;
        d[i] = (da[i] + p_ - db[i]) % p_;
      }
      add_[a * q + b] = static_cast<std::uint8_t>(pack(s));
      sub_[a * q + b] = static_cast<std::uint8_t>(pack(d));

      std::array<unsigned, 6> prod{};
      for (unsigned i = 0; i < k; ++i)
        for (unsigned j = 0; j < k; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
      // x^k = -(modulus_low), reduce from the top.
      for (unsigned deg = 2 * k - 2; deg >= k && deg < 6; --deg) {
        const unsigned c = prod[deg];
        if (c == 0) continue;
        prod[deg] = 0;
        for (unsigned i = 0; i < k; ++i) {
          const unsigned t = (c * shape.modulus_low[i]) % p_;
          prod[deg - k + i] = (prod[deg - k + i] + p_ - t) % p_;
        }
      }
      std::array<unsigned, 3> r{};
      for (unsigned i = 0; i < k; ++i) r[i] = prod[i];
      mul_[a * q + b] = static_cast<std::uint8_t>(pack(r));
    }
  }
}

std::uint8_t FiniteField::inv(std::uint8_t a) const {
  if (a == 0) throw ParameterError("inverse of zero in GF(q)");
  for (unsigned b = 1; b < q_; ++b)
    if (mul(a, static_cast<std::uint8_t>(b)) == 1) return static_cast<std::uint8_t>(b);
  throw ParameterError("element has no inverse");  // unreachable in a field
}

std::vector<std::uint8_t> coefficients(const MonicPoly& poly, unsigned q) {
  std::vector<std::uint8_t> c(poly.degree + 1, 0);
  std::uint64_t code = poly.code;
  for (unsigned i = 0; i < poly.degree; ++i) {
    c[i] = static_cast<std::uint8_t>(code % q);
    code /= q;
  }
  c[poly.degree] = 1;
  return c;
}

std::string format_poly(const MonicPoly& poly, unsigned q) {
  FieldShape shape{};
  shape_of(q, shape);
  const auto c = coefficients(poly, q);
  std::string out;
  for (unsigned i = poly.degree + 1; i-- > 0;) {
    if (c[i] == 0) continue;
    if (!out.empty()) out += '+';
    std::string coeff;
    if (c[i] >= shape.p) {
      coeff = "{" + std::to_string(c[i]) + "}";
    } else if (c[i] != 1 || i == 0) {
      coeff = std::to_string(c[i]);
    }
    out += coeff;
    if (i == 1) out += 't';
    if (i >= 2) out += "t^" + std::to_string(i);
  }
  return out;
}

std::vector<std::vector<std::uint64_t>> irreducible_codes(const FiniteField& field,
                                                          unsigned max_degree) {
  const unsigned q = field.order();
  std::vector<std::uint64_t> qpow(max_degree + 1, 1);
  for (unsigned i = 1; i <= max_degree; ++i) qpow[i] = qpow[i - 1] * q;

  std::vector<std::vector<std::uint64_t>> irreducible(max_degree + 1);
  std::vector<std::uint8_t> reducible;
  std::vector<std::uint8_t> product;
  std::vector<std::uint8_t> h_digits;

  for (unsigned d = 1; d <= max_degree; ++d) {
    reducible.assign(qpow[d], 0);
    product.assign(d + 1, 0);
    for (unsigned e = 1; 2 * e <= d; ++e) {
      const unsigned rest = d - e;
      for (const std::uint64_t f_code : irreducible[e]) {
        const auto f = coefficients(MonicPoly{e, f_code}, q);
        // h = t^rest, product = f * t^rest.
        std::fill(product.begin(), product.end(), 0);
        for (unsigned i = 0; i <= e; ++i) product[i + rest] = f[i];
        std::int64_t code = 0;
        for (unsigned i = 0; i < d; ++i) code += static_cast<std::int64_t>(product[i] * qpow[i]);
        h_digits.assign(rest, 0);
        reducible[static_cast<std::uint64_t>(code)] = 1;

        for (std::uint64_t step = 1; step < qpow[rest]; ++step) {
          unsigned j = 0;
          while (true) {
            const std::uint8_t old_digit = h_digits[j];
            const std::uint8_t new_digit =
                static_cast<std::uint8_t>(old_digit + 1 == q ? 0 : old_digit + 1);
            h_digits[j] = new_digit;
            const std::uint8_t delta = field.sub(new_digit, old_digit);
            for (unsigned i = 0; i <= e; ++i) {
              const std::uint8_t before = product[i + j];
              const std::uint8_t after = field.add(before, field.mul(delta, f[i]));
              product[i + j] = after;
              code += (static_cast<std::int64_t>(after) - before) *
                      static_cast<std::int64_t>(qpow[i + j]);
            }
            if (new_digit != 0) break;
            ++j;
          }
          reducible[static_cast<std::uint64_t>(code)] = 1;
        }
      }
    }
    for (std::uint64_t code = 0; code < qpow[d]; ++code)
      if (!reducible[code]) irreducible[d].push_back(code);
  }
  return irreducible;
}

}  // namespace mldp
