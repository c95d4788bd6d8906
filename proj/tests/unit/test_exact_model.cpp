#include <doctest.h>

#include <cmath>

#include "mldp/errors.hpp"
#include "mldp/exact_model.hpp"

using namespace mldp;

namespace {

std::vector<PrimeEntry> ints(std::initializer_list<std::uint64_t> ps) {
  std::vector<PrimeEntry> out;
  for (const auto p : ps) out.push_back({p, std::to_string(p)});
  return out;
}

Rational mean_omega(const MonoidTable& t) {
  std::uint64_t s = 0;
  for (const auto& e : t.elements) s += e.omega;
  Rational r(mpz_class(static_cast<unsigned long>(s)), mpz_class(static_cast<unsigned long>(t.count())));
  r.canonicalize();
  return r;
}

}  // namespace

TEST_CASE("expect_Z examples") {
  const auto z = PrimeSystem::integers();
  CHECK(expect_Z(z, 10, ints({2})).value == Rational(1, 2));
  CHECK(expect_Z(z, 10, ints({2, 3})).value == Rational(1, 10));
  CHECK(expect_Z(z, 10, ints({2, 3, 5})).value == 0);
  CHECK(expect_Z(z, 10, ints({})).value == 1);
  CHECK(expect_Z(z, 10, ints({2, 3})).float_value == 0.1);
}

TEST_CASE("expect_Z errors") {
  const auto z = PrimeSystem::integers();
  CHECK_THROWS_AS(expect_Z(z, 10, ints({4})), PrimeNotInSystem);
  CHECK_THROWS_AS(expect_Z(z, 10, ints({2, 2})), ParameterError);
  CHECK_THROWS_AS(expect_Z(PrimeSystem::beurling({2, 3}), 12, ints({5})), PrimeNotInSystem);
  // A prime above X is still a prime; its indicator is identically zero.
  CHECK(expect_Z(z, 10, ints({11})).value == 0);
}

TEST_CASE("expect_Y examples") {
  CHECK(expect_Y(ints({2, 3})).value == Rational(1, 6));
  CHECK(expect_Y(ints({7})).value == Rational(1, 7));
  CHECK(expect_Y(ints({})).value == 1);
}

TEST_CASE("expect_Z identities") {
  for (const auto& sys : {PrimeSystem::integers(), PrimeSystem::poly_over_fq(2), PrimeSystem::beurling({2, 3, 5, 7, 11}),
                          PrimeSystem::quadratic_field(-4)}) {
    const std::uint64_t x = 1024;
    const CountingTable counts(sys, x);
    const auto primes = list_primes(sys, x);
    Rational total = 0;
    for (const auto& p : primes) {
      const auto e = expect_Z(counts, std::vector<PrimeEntry>{p});
      CHECK(e.value <= 1);
      total += e.value;
    }
    CHECK(total == mean_omega(enumerate(sys, x, AdditiveFunction::omega())));
  }

  const CountingTable counts(PrimeSystem::integers(), 1000);
  const auto primes = list_primes(PrimeSystem::integers(), 1000);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = i + 1; j < primes.size(); j += 7) {
      const std::vector<PrimeEntry> pair{primes[i], primes[j]};
      const auto e = expect_Z(counts, pair);
      const Rational scaled = e.value * 1000;
      CHECK(scaled.get_den() == 1);
      if (primes[i].norm * primes[j].norm > 1000) CHECK(e.value == 0);
    }
  }
}

TEST_CASE("domination_report examples") {
  const auto a = domination_report(PrimeSystem::integers(), 100, 3);
  CHECK(a.m_observed == 1);
  std::uint64_t d = 1;
  for (const auto& p : a.witness) d *= p.norm;
  CHECK(100 % d == 0);

  const auto b = domination_report(PrimeSystem::integers(), 10, 1);
  CHECK(b.m_observed == 1);
  REQUIRE(b.witness.size() == 1);
  CHECK((b.witness[0].norm == 2 || b.witness[0].norm == 5));

  const auto c = domination_report(PrimeSystem::beurling({2, 3}), 12, 2);
  CHECK(c.m_observed == Rational(3, 2));
  REQUIRE(c.witness.size() == 2);
  CHECK(c.witness[0].norm == 2);
  CHECK(c.witness[1].norm == 3);

  CHECK_THROWS_AS(domination_report(PrimeSystem::integers(), 100, 0), ParameterError);
  ExecutionOptions tight;
  tight.budget.max_tuples = 1000;
  CHECK_THROWS_AS(domination_report(PrimeSystem::integers(), 1000000, 3, tight), BudgetExceeded);
}

TEST_CASE("domination_report is thread-independent") {
  ExecutionOptions one, many;
  one.threads = 1;
  many.threads = 6;
  const auto sys = PrimeSystem::quadratic_field(-7);
  const auto a = domination_report(sys, 3000, 3, one);
  const auto b = domination_report(sys, 3000, 3, many);
  CHECK(a.m_observed == b.m_observed);
  CHECK(a.witness == b.witness);
  CHECK(a.tuples_examined == b.tuples_examined);
}

TEST_CASE("truncation_sets examples") {
  const auto omega = AdditiveFunction::omega();
  const auto big = truncation_sets(PrimeSystem::integers(), omega, 1000000, 5);
  CHECK(big.k_X == doctest::Approx(7.415).epsilon(1e-3));
  CHECK(big.B == ints({2, 3, 5, 7}));
  CHECK(big.T.empty());
  CHECK(big.A.size() == 78498 - 4);

  const auto none = truncation_sets(PrimeSystem::integers(), omega, 100, 0.5);
  CHECK(none.A.empty());
  CHECK(none.B.empty());
  CHECK(none.T.size() == 25);

  const auto small = truncation_sets(PrimeSystem::integers(), omega, 100, 5);
  CHECK(small.k_X == doctest::Approx(7.204).epsilon(1e-3));
  CHECK(small.B == ints({2, 3, 5, 7}));
  CHECK(small.A.size() == 21);
  CHECK(small.A.front().norm == 11);

  CHECK_THROWS_AS(truncation_sets(PrimeSystem::integers(), omega, 15, 5), ParameterError);
}

TEST_CASE("mgf_Y examples") {
  const auto omega = AdditiveFunction::omega();
  CHECK(mgf_Y(ints({2, 3, 5}), omega, 0).value == 1.0);
  CHECK(mgf_Y(ints({2, 3}), omega, std::log(2.0)).value == doctest::Approx(2.0).epsilon(1e-14));
  const auto g = AdditiveFunction::table_lookup({{7, 0.0}}, 1.0);
  CHECK(mgf_Y(ints({7}), g, 3.7).value == 1.0);
  CHECK(mgf_Y(ints({}), omega, 3.7).value == 1.0);
}

TEST_CASE("mgf_Z examples") {
  const auto omega = AdditiveFunction::omega();
  const auto z = PrimeSystem::integers();
  CHECK(mgf_Z(z, 100, ints({2, 3}), omega, 0).value == 1.0);
  CHECK(mgf_Z(z, 3, ints({2, 3}), omega, std::log(2.0)).value == doctest::Approx(5.0 / 3).epsilon(1e-14));
  CHECK(mgf_Z(z, 10, ints({2}), omega, std::log(2.0)).value == doctest::Approx(1.5).epsilon(1e-14));
  CHECK_THROWS_AS(mgf_Z(z, 10, ints({11}), omega, 1.0), PrimeNotInSystem);
}

TEST_CASE("mgf_Z matches the subset expansion over exact expectations") {
  // E[prod (1 + (e^{theta g} - 1) Z_p)] = sum over S of prod_{p in S} (e^{theta g(p)} - 1) E[Z_S]
  const auto g = AdditiveFunction::parse("table:2=0.5,3=1.5,5=0.25:1");
  for (const auto& sys : {PrimeSystem::integers(), PrimeSystem::beurling({2, 3, 5, 5, 7})}) {
    const std::uint64_t x = 5000;
    const auto primes = list_primes(sys, x);
    const std::vector<PrimeEntry> subset(primes.begin(), primes.begin() + 5);
    const CountingTable counts(sys, x);
    for (double theta : {-1.0, 0.3, 1.0, 2.0}) {
      double expansion = 0.0;
      for (unsigned mask = 0; mask < (1u << subset.size()); ++mask) {
        std::vector<PrimeEntry> s;
        double weight = 1.0;
        for (std::size_t i = 0; i < subset.size(); ++i) {
          if (mask & (1u << i)) {
            s.push_back(subset[i]);
            weight *= std::expm1(theta * g(subset[i]));
          }
        }
        expansion += weight * expect_Z(counts, s).float_value;
      }
      CHECK(mgf_Z(sys, x, subset, g, theta).value == doctest::Approx(expansion).epsilon(1e-12));
    }
  }
}

TEST_CASE("MGFs are nondecreasing in theta for non-negative g") {
  const auto g = AdditiveFunction::norm_residue(3, {2}, 2.0, 0.5);
  const auto subset = list_primes(PrimeSystem::integers(), 30);
  double prev_z = 0, prev_y = 0;
  for (double theta = 0; theta <= 3; theta += 0.25) {
    const double z = mgf_Z(PrimeSystem::integers(), 2000, subset, g, theta).value;
    const double y = mgf_Y(subset, g, theta).value;
    CHECK(z >= prev_z);
    CHECK(y >= prev_y);
    prev_z = z;
    prev_y = y;
  }
}

TEST_CASE("mgf_Z is dominated by M times mgf_Y") {
  const auto omega = AdditiveFunction::omega();
  for (const auto& [sys, x] : {std::pair{PrimeSystem::integers(), std::uint64_t{100}},
                               std::pair{PrimeSystem::beurling({2, 3}), std::uint64_t{12}},
                               std::pair{PrimeSystem::quadratic_field(-4), std::uint64_t{200}}}) {
    const auto primes = list_primes(sys, x);
    // Subsets small enough that every tuple fits in k_max.
    const std::vector<PrimeEntry> subset(primes.begin(), primes.begin() + std::min<std::size_t>(3, primes.size()));
    const auto m = domination_report(sys, x, 3).m_observed_float;
    for (double theta = 0; theta <= 4; theta += 0.5) {
      CHECK(mgf_Z(sys, x, subset, omega, theta).value <= m * mgf_Y(subset, omega, theta).value * (1 + 1e-12));
    }
  }
}

TEST_CASE("mz9_gap examples") {
  const auto omega = AdditiveFunction::omega();
  const auto z = PrimeSystem::integers();
  CHECK(mz9_gap(z, omega, 100, 0.5, 1).gap == 0.0);
  const auto r = mz9_gap(z, omega, 100, 5, 1);
  CHECK(r.b_size == 4);
  CHECK(r.gap > 0);
  CHECK(r.gap == std::abs(r.mgf_z.value - r.mgf_y.value));
  for (std::uint64_t x : {100ull, 10000ull}) CHECK(mz9_gap(z, omega, x, 5, 0).gap == 0.0);

  double prev = 1e9;
  for (std::uint64_t x : {1000ull, 10000ull, 100000ull, 1000000ull}) {
    const double gap = mz9_gap(z, omega, x, 5, 1).gap;
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("MGFs switch to log space for huge exponents") {
  const auto g = AdditiveFunction::table_lookup({}, 400.0);
  const auto subset = ints({2, 3});
  const auto y = mgf_Y(subset, g, 2.0);
  CHECK(y.log_space);
  CHECK(y.log_value == doctest::Approx(1600.0 - std::log(6.0)).epsilon(1e-12));
  const auto zz = mgf_Z(PrimeSystem::integers(), 10, subset, g, 2.0);
  CHECK(zz.log_space);
  // only m = 6 contributes e^{1600}
  CHECK(zz.log_value == doctest::Approx(1600.0 - std::log(10.0)).epsilon(1e-12));
  const auto gap = mz9_gap(PrimeSystem::integers(), g, 20, 500, 2.0);
  CHECK(std::isfinite(gap.log_gap));
}

TEST_CASE("tail_mass examples") {
  const auto z = PrimeSystem::integers();
  CHECK(tail_mass(z, AdditiveFunction::omega(), 100, 5, 1) == 0.0);
  CHECK(tail_mass(z, AdditiveFunction::norm_residue(4, {1}, 10, 0), 10, 5, 0.1) ==
        doctest::Approx(0.29218).epsilon(1e-4));
  CHECK(tail_mass(z, AdditiveFunction::norm_residue(4, {1}, 10, 0), 1000, 5, 0) == 0.0);
  CHECK_THROWS_AS(tail_mass(z, AdditiveFunction::omega(), 100, 5, -1), ParameterError);
}
