#include <doctest.h>

#include <cmath>
#include <limits>

#include "mldp/errors.hpp"
#include "mldp/experiments.hpp"

using namespace mldp;

namespace {
const std::string kData = MLDP_TEST_DATA_DIR;
const double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_CASE("normal CDF and KS distance") {
  CHECK(normal_cdf(0) == 0.5);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  std::vector<double> one{0.0};
  CHECK(ks_distance_normal(one) == 0.5);
  std::vector<double> quantiles;
  for (int i = 1; i < 1000; ++i) {
    // midpoints of 999 equal-probability cells via bisection on the CDF
    const double p = (i - 0.5) / 999.0;
    double lo = -10, hi = 10;
    for (int k = 0; k < 100; ++k) (normal_cdf(0.5 * (lo + hi)) < p ? lo : hi) = 0.5 * (lo + hi);
    quantiles.push_back(0.5 * (lo + hi));
  }
  CHECK(ks_distance_normal(quantiles) == doctest::Approx(0.5 / 999).epsilon(1e-6));
  std::vector<double> empty;
  CHECK_THROWS_AS(ks_distance_normal(empty), EmptySample);
}

TEST_CASE("ek_report at 10^6 matches the exact mean identity") {
  const auto ek = ek_report(PrimeSystem::integers(), 1000000);
  std::uint64_t floor_sum = 0;
  for (const auto p : sieve_primes(1000000)) floor_sum += 1000000 / p;
  Rational expected(mpz_class(static_cast<unsigned long>(floor_sum)), mpz_class(1000000));
  expected.canonicalize();
  CHECK(ek.mean_omega_exact == expected);
  CHECK(std::abs(ek.mean_omega - ek.mertens_mean) < 0.3);
  CHECK(ek.samples == 1000000);
  CHECK(ek.ks_samples == 999998);
  CHECK(ek.ks_distance >= 0);
  CHECK(ek.ks_distance <= 1);

  const auto small = ek_report(PrimeSystem::integers(), 10000);
  CHECK(ek.ks_distance < small.ks_distance);
}

TEST_CASE("ek_report errors") {
  const auto table = enumerate(PrimeSystem::integers(), 2, AdditiveFunction::omega());
  CHECK_THROWS_AS(ek_report(table), EmptySample);
  CHECK_THROWS_AS(ek_report(table, 2), ParameterError);
  CHECK_THROWS_AS(ek_report(PrimeSystem::integers(), 15), ParameterError);
  // Mean identity also holds on other systems.
  const auto sys = PrimeSystem::poly_over_fq(2);
  const auto ek = ek_report(sys, 1024);
  const CountingTable counts(sys, 1024);
  Rational total = 0;
  for (const auto& p : list_primes(sys, 1024)) total += expect_Z(counts, std::vector<PrimeEntry>{p}).value;
  CHECK(ek.mean_omega_exact == total);
}

TEST_CASE("ldp_scan examples") {
  const auto sys = PrimeSystem::integers();
  const auto omega = AdditiveFunction::omega();
  const double l10 = std::log(std::log(10.0));
  const std::vector<Interval> intervals{{2.0 / l10, kInf}, {0, kInf}, {-3, -1}};
  const auto scan = ldp_scan(sys, omega, std::vector<std::uint64_t>{10}, intervals, DiscreteMeasure::delta(1));
  REQUIRE(scan.rows.size() == 3);
  CHECK(scan.rows[0].tail_prob == Rational(1, 5));  // 2/10
  CHECK(scan.rows[1].tail_prob == 1);
  CHECK(scan.rows[1].normalized == 0.0);
  CHECK(scan.rows[2].tail_prob == 0);
  CHECK(scan.rows[2].normalized == -kInf);
  CHECK(scan.rows[0].rate_bound == doctest::Approx(-rate_closed_form_omega(2.0 / l10)));
  CHECK(scan.rows[1].rate_bound == 0.0);
}

TEST_CASE("ldp_scan tail probabilities over a partition sum to one") {
  std::vector<Interval> parts{{-kInf, 0.5, false}, {0.5, 1.0, false}, {1.0, 1.5, false},
                              {1.5, 2.0, false},   {2.0, kInf, true}};
  const auto scan = ldp_scan(PrimeSystem::integers(), AdditiveFunction::omega(), std::vector<std::uint64_t>{10000},
                             parts, DiscreteMeasure::delta(1));
  Rational total = 0;
  for (const auto& row : scan.rows) total += row.tail_prob;
  CHECK(total == 1);
}

TEST_CASE("condition_sweep examples") {
  const std::vector<std::uint64_t> grid{1000, 10000, 100000, 1000000};
  const std::vector<double> thetas{-1, 1, 2};
  const auto ok = condition_sweep(PrimeSystem::integers(), AdditiveFunction::omega(), DiscreteMeasure::delta(1), grid,
                                  thetas);
  for (const auto& c : ok.checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.flag == Flag::Pass);
  }
  CHECK(to_report(ok).exit_code() == 0);

  const auto twos = PrimeSystem::beurling_file(kData + "/twos.txt");
  const auto bad = condition_sweep(twos, AdditiveFunction::omega(), DiscreteMeasure::delta(1), grid, thetas);
  REQUIRE_FALSE(bad.checks.empty());
  CHECK(bad.checks[0].name == "density");
  CHECK(bad.checks[0].flag == Flag::Failed);
  CHECK(to_report(bad).exit_code() == 2);

  CHECK_THROWS_AS(condition_sweep(PrimeSystem::beurling_file(kData + "/empty.txt"), AdditiveFunction::omega(),
                                  DiscreteMeasure::delta(1), grid, thetas),
                  EmptySystem);
}

TEST_CASE("condition_sweep on a residue function") {
  const std::vector<std::uint64_t> grid{100, 1000, 10000, 100000, 1000000};
  const std::vector<double> thetas{1};
  const auto s = condition_sweep(PrimeSystem::integers(), AdditiveFunction::norm_residue(4, {1}, 1, 0),
                                 DiscreteMeasure({{0, 0.5}, {1, 0.5}}), grid, thetas);
  REQUIRE(s.convergence.size() == 5);
  CHECK(s.convergence.back().deviation < s.convergence.front().deviation);
}

TEST_CASE("gap_sweep examples") {
  const auto omega = AdditiveFunction::omega();
  const auto sweep = gap_sweep(PrimeSystem::integers(), omega, std::vector<std::uint64_t>{1000, 10000, 100000}, 5, 1);
  REQUIRE(sweep.rows.size() == 3);
  CHECK(sweep.rows[1].gap.gap < sweep.rows[0].gap.gap);
  CHECK(sweep.rows[2].gap.gap < sweep.rows[1].gap.gap);
  CHECK(to_report(sweep).exit_code() == 0);

  const auto zero = gap_sweep(PrimeSystem::integers(), omega, std::vector<std::uint64_t>{100, 1000}, 5, 0);
  for (const auto& r : zero.rows) CHECK(r.gap.gap == 0.0);

  const auto empty_b = gap_sweep(PrimeSystem::integers(), omega, std::vector<std::uint64_t>{100, 1000}, 0.5, 1);
  for (const auto& r : empty_b.rows) CHECK(r.gap.gap == 0.0);
  CHECK(to_report(empty_b).exit_code() == 1);
}

TEST_CASE("report tables have the documented schemas") {
  const auto gap = to_report(gap_sweep(PrimeSystem::integers(), AdditiveFunction::omega(),
                                       std::vector<std::uint64_t>{100}, 5, 1));
  CHECK(gap.tables[0].columns == std::vector<std::string>{"X", "C", "theta", "mgf_Z", "mgf_Y", "gap"});
  const auto dom = to_report(domination_report(PrimeSystem::integers(), 100, 2));
  CHECK(dom.tables[0].columns == std::vector<std::string>{"X", "k_max", "M_observed", "witness"});
  const auto rp = to_report(rate_profile(DiscreteMeasure::delta(1), std::vector<double>{1}));
  CHECK(rp.tables[0].columns == std::vector<std::string>{"x", "I", "theta_star", "iters", "status"});
  CHECK(format_number(1.0 / 3) == "0.333333333333");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(kInf) == "inf");
}
