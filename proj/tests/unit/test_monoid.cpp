#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mldp/errors.hpp"
#include "mldp/monoid.hpp"

using namespace mldp;

namespace {

std::map<std::uint64_t, std::uint64_t> omega_histogram(const MonoidTable& t) {
  std::map<std::uint64_t, std::uint64_t> out;
  for (const auto& [v, c] : histogram(t, Statistic::Omega).bins) out[static_cast<std::uint64_t>(v)] = c;
  return out;
}

ExecutionOptions threads(unsigned n) {
  ExecutionOptions o;
  o.threads = n;
  return o;
}

}  // namespace

TEST_CASE("enumerate: integers up to 10") {
  const auto t = enumerate(PrimeSystem::integers(), 10, AdditiveFunction::omega());
  CHECK(t.count() == 10);
  CHECK(omega_histogram(t) == std::map<std::uint64_t, std::uint64_t>{{0, 1}, {1, 7}, {2, 2}});
  CHECK(t.elements.front() == MonoidElement{1, 0, 0.0});
}

TEST_CASE("enumerate: F_2[t] up to norm 4") {
  const auto t = enumerate(PrimeSystem::poly_over_fq(2), 4, AdditiveFunction::omega());
  CHECK(t.count() == 7);
  CHECK(omega_histogram(t) == std::map<std::uint64_t, std::uint64_t>{{0, 1}, {1, 5}, {2, 1}});
}

TEST_CASE("enumerate: Beurling {2,3} up to 12") {
  const auto t = enumerate(PrimeSystem::beurling({2, 3}), 12, AdditiveFunction::omega());
  std::vector<std::pair<std::uint64_t, std::uint32_t>> got;
  for (const auto& e : t.elements) got.emplace_back(e.norm, e.omega);
  CHECK(got == std::vector<std::pair<std::uint64_t, std::uint32_t>>{
                   {1, 0}, {2, 1}, {3, 1}, {4, 1}, {6, 2}, {8, 1}, {9, 1}, {12, 2}});
}

TEST_CASE("enumerate: equal norms are distinct branches") {
  const auto t = enumerate(PrimeSystem::beurling({2, 2}), 4, AdditiveFunction::omega());
  // 1, a, b, a^2, ab, b^2
  CHECK(t.count() == 6);
  CHECK(omega_histogram(t) == std::map<std::uint64_t, std::uint64_t>{{0, 1}, {1, 4}, {2, 1}});
}

TEST_CASE("histogram examples") {
  const auto t1 = enumerate(PrimeSystem::integers(), 1, AdditiveFunction::omega());
  const auto h1 = histogram(t1, Statistic::Omega);
  CHECK(h1.total == 1);
  REQUIRE(h1.bins.size() == 1);
  CHECK(h1.bins[0] == std::pair<double, std::uint64_t>{0.0, 1});

  const auto t = enumerate(PrimeSystem::integers(), 10, AdditiveFunction::omega());
  CHECK(histogram(t, Statistic::GSum).total == 10);

  const auto g = AdditiveFunction::norm_residue(4, {1}, 0.5, 0.0);
  const auto half = enumerate(PrimeSystem::integers(), 30, g);
  CHECK_THROWS_AS(histogram(half, Statistic::GSum), NonIntegerStatistic);
  const auto binned = histogram(half, Statistic::GSum, 1.0);
  CHECK(binned.total == 30);
  CHECK_FALSE(binned.exact);
}

TEST_CASE("sieve and recursion agree for integers") {
  const auto g = AdditiveFunction::norm_residue(3, {1}, 2.5, 1.0);
  for (std::uint64_t x = 1; x <= 10000; x = x < 300 ? x + 1 : x * 3 / 2) {
    for (const auto& f : {AdditiveFunction::omega(), g}) {
      const auto a = enumerate(PrimeSystem::integers(), x, f, {}, EnumerationPath::Sieve);
      const auto b = enumerate(PrimeSystem::integers(), x, f, {}, EnumerationPath::Recursive);
      CAPTURE(x);
      CHECK(a.elements == b.elements);
    }
  }
  const auto a = enumerate(PrimeSystem::integers(), 10000, g, {}, EnumerationPath::Sieve);
  const auto b = enumerate(PrimeSystem::integers(), 10000, g, {}, EnumerationPath::Recursive);
  CHECK(a.elements == b.elements);
  CHECK_THROWS_AS(enumerate(PrimeSystem::beurling({2}), 10, g, {}, EnumerationPath::Sieve), ParameterError);
}

TEST_CASE("table size equals count_elements") {
  for (const auto& sys : {PrimeSystem::integers(), PrimeSystem::poly_over_fq(3), PrimeSystem::quadratic_field(-4),
                          PrimeSystem::beurling({2, 3, 3, 5})}) {
    for (std::uint64_t x : {1ull, 10ull, 81ull, 1000ull, 6561ull}) {
      CHECK(enumerate(sys, x, AdditiveFunction::omega()).count() == count_elements(sys, x));
    }
  }
}

TEST_CASE("sum of omega equals sum of floor(X/p) for integers") {
  for (std::uint64_t x : {10ull, 1000ull, 100000ull}) {
    const auto t = enumerate(PrimeSystem::integers(), x, AdditiveFunction::omega());
    std::uint64_t lhs = 0, rhs = 0;
    for (const auto& e : t.elements) lhs += e.omega;
    for (const auto p : sieve_primes(x)) rhs += x / p;
    CHECK(lhs == rhs);
  }
}

TEST_CASE("element invariants") {
  const auto t = enumerate(PrimeSystem::quadratic_field(-7), 5000, AdditiveFunction::omega());
  CHECK(std::is_sorted(t.elements.begin(), t.elements.end(),
                       [](const auto& a, const auto& b) { return a.norm < b.norm; }));
  for (const auto& e : t.elements) {
    CHECK(e.norm <= 5000);
    if (e.norm >= 2) CHECK(e.omega <= std::log2(static_cast<double>(e.norm)));
  }
}

TEST_CASE("enumeration is independent of the thread count") {
  const auto g = AdditiveFunction::norm_residue(4, {1}, 1.25, 0.5);
  for (const auto& sys : {PrimeSystem::integers(), PrimeSystem::poly_over_fq(2), PrimeSystem::beurling({2, 3, 3, 7})}) {
    const auto a = enumerate(sys, 50000, g, threads(1));
    const auto b = enumerate(sys, 50000, g, threads(7));
    CHECK(a.elements == b.elements);
  }
}

TEST_CASE("budgets and overflow") {
  ExecutionOptions tight;
  tight.budget.max_elements = 100;
  CHECK_THROWS_AS(enumerate(PrimeSystem::beurling({2, 3}), 1000000, AdditiveFunction::omega(), tight),
                  BudgetExceeded);
  CHECK_THROWS_AS(enumerate(PrimeSystem::integers(), 1000, AdditiveFunction::omega(), tight), BudgetExceeded);
  CHECK_THROWS_AS(enumerate(PrimeSystem::poly_over_fq(2), 20000000, AdditiveFunction::omega()), BudgetExceeded);
  CHECK_THROWS_AS(CountingTable(PrimeSystem::beurling({2}), 20000000), BudgetExceeded);
  CHECK_THROWS_AS(enumerate(PrimeSystem::integers(), std::uint64_t{1} << 63, AdditiveFunction::omega()),
                  OverflowError);
  CHECK_THROWS_AS(list_primes(PrimeSystem::integers(), 1'000'000'000'000ull), BudgetExceeded);
}

TEST_CASE("counting table") {
  const CountingTable c(PrimeSystem::beurling({2, 3}), 12);
  CHECK(c.total() == 8);
  CHECK(c.count(2) == 2);
  CHECK(c.count(0) == 0);
  CHECK_THROWS_AS(c.count(13), ParameterError);
  const CountingTable z(PrimeSystem::integers(), 100);
  CHECK(z.count(37) == 37);
}

TEST_CASE("CSV and binary cache") {
  const auto g = AdditiveFunction::norm_residue(4, {1}, 0.1, 0.0);
  const auto t = enumerate(PrimeSystem::integers(), 6, g);
  std::ostringstream os;
  write_table_csv(os, t);
  CHECK(os.str() == "norm,omega,gsum\n1,0,0\n2,1,0\n3,1,0\n4,1,0\n5,1,0.1\n6,2,0\n");

  const auto big = enumerate(PrimeSystem::integers(), 5000, g);
  const auto path = std::filesystem::temp_directory_path() / "mldp_cache_test.bin";
  write_table_binary(path, big);
  CHECK(std::filesystem::file_size(path) == 16 + 20 * big.count());
  {
    std::ifstream in(path, std::ios::binary);
    char magic[8];
    in.read(magic, 8);
    CHECK(std::string(magic, 8) == "MLDP0001");
  }
  CHECK(read_table_binary(path) == big.elements);

  std::ofstream(path, std::ios::binary) << "NOTMAGIC";
  CHECK_THROWS_AS(read_table_binary(path), SourceError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_table_binary(path), SourceError);
}
