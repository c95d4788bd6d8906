#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mldp/errors.hpp"
#include "mldp/rate.hpp"

using namespace mldp;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::vector<DiscreteMeasure> test_measures() {
  return {DiscreteMeasure::delta(1), DiscreteMeasure({{0, 0.5}, {1, 0.5}}),
          DiscreteMeasure({{0.5, 0.2}, {1, 0.3}, {3, 0.5}}), DiscreteMeasure({{-1, 0.5}, {1, 0.5}}),
          DiscreteMeasure({{0, 0.9}, {10, 0.1}})};
}

// Independent maximizer of theta*x - Lambda(theta) by golden-section search.
double golden_section_rate(const DiscreteMeasure& rho, double x, double lo, double hi) {
  auto f = [&](double t) { return t * x - lambda_of_theta(rho, t); };
  const double r = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  for (int i = 0; i < 300; ++i) {
    if (f(c) > f(d)) b = d;
    else a = c;
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return f(0.5 * (a + b));
}

}  // namespace

TEST_CASE("lambda_of_theta examples") {
  CHECK(lambda_of_theta(DiscreteMeasure::delta(1), 1) == doctest::Approx(M_E - 1));
  CHECK(lambda_of_theta(DiscreteMeasure::delta(1), 0) == 0.0);
  CHECK(lambda_of_theta(DiscreteMeasure({{0, 0.5}, {1, 0.5}}), std::log(2.0)) == doctest::Approx(0.5));
}

TEST_CASE("rate examples for delta_1") {
  const auto d = DiscreteMeasure::delta(1);
  const auto at1 = rate(d, 1);
  CHECK(at1.value == 0.0);
  REQUIRE(at1.theta_star);
  CHECK(*at1.theta_star == 0.0);

  const auto at0 = rate(d, 0);
  CHECK(at0.value == 1.0);
  CHECK(at0.status == RateStatus::SaturatedLeft);
  CHECK_FALSE(at0.theta_star);

  const auto at2 = rate(d, 2);
  CHECK(std::abs(at2.value - (2 * std::log(2.0) - 1)) < 1e-8);
  REQUIRE(at2.theta_star);
  CHECK(*at2.theta_star == doctest::Approx(std::log(2.0)).epsilon(1e-10));

  const auto neg = rate(d, -0.5);
  CHECK(neg.value == kInf);
  CHECK(neg.status == RateStatus::Infinite);
}

TEST_CASE("rate_closed_form_omega examples") {
  CHECK(rate_closed_form_omega(1) == 0.0);
  CHECK(rate_closed_form_omega(0) == 1.0);
  CHECK(rate_closed_form_omega(M_E) == doctest::Approx(1.0));
  CHECK(rate_closed_form_omega(-1) == kInf);
}

TEST_CASE("numeric rate agrees with the closed form on x = 0.1..5.0") {
  const auto d = DiscreteMeasure::delta(1);
  for (int i = 1; i <= 50; ++i) {
    const double x = 0.1 * i;
    CAPTURE(x);
    CHECK(std::abs(rate(d, x).value - rate_closed_form_omega(x)) <= 1e-8);
  }
}

TEST_CASE("rate_profile examples") {
  const auto p = rate_profile(DiscreteMeasure::delta(1), std::vector<double>{0.5, 1, 2});
  REQUIRE(p.points.size() == 3);
  CHECK(p.points[0].value == doctest::Approx(0.153426).epsilon(1e-6));
  CHECK(p.points[1].value == 0.0);
  CHECK(p.points[2].value == doctest::Approx(0.386294).epsilon(1e-6));

  const auto half = rate_profile(DiscreteMeasure({{0, 0.5}, {1, 0.5}}), std::vector<double>{0.5});
  CHECK(half.points[0].value == 0.0);

  const auto inf = rate_profile(DiscreteMeasure::delta(1), std::vector<double>{-1});
  CHECK(inf.points[0].value == kInf);

  CHECK_THROWS_AS(rate_profile(DiscreteMeasure::delta(1), std::vector<double>{2, 1}), ParameterError);
}

TEST_CASE("Lambda is convex") {
  for (const auto& m : test_measures()) {
    const double h = 1e-3;
    for (double t = -10; t <= 10; t += 0.25) {
      const double second = lambda_of_theta(m, t + h) - 2 * lambda_of_theta(m, t) + lambda_of_theta(m, t - h);
      CHECK(second >= -1e-9 * std::max(1.0, std::abs(lambda_of_theta(m, t))));
    }
  }
}

TEST_CASE("rate vanishes at the mean") {
  for (const auto& m : test_measures()) {
    const auto r = rate(m, m.mean());
    CHECK(std::abs(r.value) <= 1e-10);
    REQUIRE(r.theta_star);
    CHECK(std::abs(*r.theta_star) <= 1e-10);
  }
}

TEST_CASE("rate is non-negative and midpoint convex along a grid") {
  for (const auto& m : test_measures()) {
    std::vector<double> xs, is;
    for (double x = -2; x <= 6; x += 0.1) {
      const auto r = rate(m, x);
      CHECK(r.value >= 0);
      xs.push_back(x);
      is.push_back(r.value);
    }
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
      if (std::isinf(is[i - 1]) || std::isinf(is[i + 1])) continue;
      CHECK(is[i] <= 0.5 * (is[i - 1] + is[i + 1]) + 1e-9);
    }
  }
}

TEST_CASE("duality probes") {
  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> theta(-8, 8);
  for (const auto& m : test_measures()) {
    for (double x = 0.05; x <= 5; x += 0.35) {
      const auto r = rate(m, x);
      if (!r.theta_star) continue;
      const double best = *r.theta_star * x - lambda_of_theta(m, *r.theta_star);
      for (int k = 0; k < 100; ++k) {
        const double t = theta(rng);
        CHECK(best >= t * x - lambda_of_theta(m, t) - 1e-12 * std::max(1.0, std::abs(best)));
      }
    }
  }
}

TEST_CASE("Newton agrees with golden-section maximization") {
  for (const auto& m : test_measures()) {
    for (double x = 0.2; x <= 4; x += 0.3) {
      const auto r = rate(m, x);
      if (!r.theta_star) continue;
      const double gs = golden_section_rate(m, x, *r.theta_star - 5, *r.theta_star + 5);
      CAPTURE(x);
      CHECK(std::abs(gs - r.value) <= 1e-6);
    }
  }
}

TEST_CASE("measures with atoms of both signs") {
  const DiscreteMeasure sym({{-1, 0.5}, {1, 0.5}});
  for (double x : {-3.0, -0.5, 0.7, 2.0}) {
    const double expected = x * std::asinh(x) - std::sqrt(1 + x * x) + 1;
    CHECK(rate(sym, x).value == doctest::Approx(expected).epsilon(1e-10));
  }
  const auto neg = DiscreteMeasure::delta(-1);
  CHECK(rate(neg, 0).status == RateStatus::SaturatedRight);
  CHECK(rate(neg, 0).value == 1.0);
  CHECK(rate(neg, 0.5).value == kInf);
  CHECK(rate(DiscreteMeasure::delta(0), 0).value == 0.0);
  CHECK(rate(DiscreteMeasure::delta(0), 1).value == kInf);
}

TEST_CASE("rate_infimum over intervals") {
  const auto d = DiscreteMeasure::delta(1);
  CHECK(rate_infimum(d, 0, 2) == 0.0);
  CHECK(rate_infimum(d, 2, kInf) == doctest::Approx(2 * std::log(2.0) - 1));
  CHECK(rate_infimum(d, -kInf, 0.5) == doctest::Approx(rate_closed_form_omega(0.5)));
  CHECK(rate_infimum(d, -2, -1) == kInf);
}
