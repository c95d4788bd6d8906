#include "mldp/prime_systems.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mldp/errors.hpp"
#include "mldp/finite_field.hpp"
#include "mldp/monoid.hpp"

namespace mldp {
namespace {

std::uint64_t parse_u64(std::string_view text, const char* what) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParameterError(std::string("invalid ") + what + ": '" + std::string(text) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool is_squarefree(long long n) {
  n = n < 0 ? -n : n;
  for (long long d = 2; d * d <= n; ++d)
    if (n % (d * d) == 0) return false;
  return true;
}

// Largest d with q^d <= limit.
unsigned max_degree(unsigned q, std::uint64_t limit) {
  unsigned d = 0;
  std::uint64_t power = 1;
  while (power <= limit / q) {
    power *= q;
    ++d;
  }
  return d;
}

std::uint64_t ipow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

std::vector<std::uint64_t> read_beurling_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SourceError("cannot open Beurling source '" + path.string() + "'");
  std::vector<std::uint64_t> norms;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw SourceError(path.string() + ":" + std::to_string(line_no) + ": not a positive integer: '" +
                        std::string(text) + "'");
    }
    if (value < 2) {
      throw SourceError(path.string() + ":" + std::to_string(line_no) + ": norm must be >= 2");
    }
    norms.push_back(value);
  }
  if (in.bad()) throw SourceError("read error on '" + path.string() + "'");
  return norms;
}

// Prime ideals of the quadratic order above each rational prime p <= limit.
template <typename Emit>
void quadratic_primes(int discriminant, std::uint64_t limit, Emit&& emit) {
  for (const std::uint64_t p : sieve_primes(limit)) {
    const std::string tag = std::to_string(p);
    switch (kronecker_symbol(discriminant, p)) {
      case 1:
        emit(p, "P(" + tag + ")+");
        emit(p, "P(" + tag + ")-");
        break;
      case 0:
        emit(p, "P(" + tag + ")");
        break;
      default:
        if (p <= limit / p) emit(p * p, "(" + tag + ")");
        break;
    }
  }
}

}  // namespace

// PrimeSystem ---------------------------------------------------------------

PrimeSystem PrimeSystem::integers() { return PrimeSystem{}; }

PrimeSystem PrimeSystem::poly_over_fq(unsigned q) {
  if (!FiniteField::is_supported(q)) {
    throw ParameterError("PolyOverFq: q = " + std::to_string(q) +
                         " is not a supported prime power (2,3,4,5,7,8,9)");
  }
  PrimeSystem s;
  s.kind_ = SystemKind::PolyOverFq;
  s.q_ = q;
  return s;
}

PrimeSystem PrimeSystem::quadratic_field(int discriminant) {
  if (discriminant < -100 || discriminant > 100 || !is_fundamental_discriminant(discriminant)) {
    throw ParameterError("QuadraticField: D = " + std::to_string(discriminant) +
                         " is not a fundamental discriminant with |D| <= 100");
  }
  PrimeSystem s;
  s.kind_ = SystemKind::QuadraticField;
  s.discriminant_ = discriminant;
  return s;
}

PrimeSystem PrimeSystem::beurling_file(const std::filesystem::path& path) {
  auto norms = read_beurling_file(path);
  std::sort(norms.begin(), norms.end());
  PrimeSystem s;
  s.kind_ = SystemKind::Beurling;
  s.source_ = path.string();
  s.norms_ = std::make_shared<const std::vector<std::uint64_t>>(std::move(norms));
  return s;
}

PrimeSystem PrimeSystem::beurling(std::vector<std::uint64_t> norms) {
  for (const auto n : norms)
    if (n < 2) throw SourceError("Beurling norm " + std::to_string(n) + " is below 2");
  std::sort(norms.begin(), norms.end());
  PrimeSystem s;
  s.kind_ = SystemKind::Beurling;
  s.norms_ = std::make_shared<const std::vector<std::uint64_t>>(std::move(norms));
  return s;
}

PrimeSystem PrimeSystem::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  if (head == "integers" && colon == std::string_view::npos) return integers();
  if (head == "poly" && !arg.empty()) {
    return poly_over_fq(static_cast<unsigned>(std::min<std::uint64_t>(parse_u64(arg, "q"), 1000)));
  }
  if (head == "quad" && !arg.empty()) {
    int d = 0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), d);
    if (ec != std::errc{} || ptr != arg.data() + arg.size())
      throw ParameterError("invalid discriminant '" + std::string(arg) + "'");
    return quadratic_field(d);
  }
  if (head == "beurling" && !arg.empty()) return beurling_file(std::filesystem::path(std::string(arg)));
  if (head == "beurling-list") {
    std::vector<std::uint64_t> norms;
    std::string_view rest = arg;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      if (!item.empty()) norms.push_back(parse_u64(item, "Beurling norm"));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return beurling(std::move(norms));
  }
  throw ParameterError("unknown system '" + std::string(spec) +
                       "' (expected integers, poly:Q, quad:D, beurling:PATH or beurling-list:N,...)");
}

std::span<const std::uint64_t> PrimeSystem::beurling_norms() const noexcept {
  if (!norms_) return {};
  return {norms_->data(), norms_->size()};
}

std::string PrimeSystem::spec() const {
  switch (kind_) {
    case SystemKind::Integers:
      return "integers";
    case SystemKind::PolyOverFq:
      return "poly:" + std::to_string(q_);
    case SystemKind::QuadraticField:
      return "quad:" + std::to_string(discriminant_);
    case SystemKind::Beurling:
      break;
  }
  if (!source_.empty()) return "beurling:" + source_;
  std::string out = "beurling-list:";
  for (std::size_t i = 0; i < norms_->size(); ++i) {
    if (i) out += ',';
    out += std::to_string((*norms_)[i]);
  }
  return out;
}

const char* to_string(FitStatus status) noexcept {
  switch (status) {
    case FitStatus::Ok: return "OK";
    case FitStatus::Exact: return "EXACT";
    case FitStatus::Failed: return "FAILED";
  }
  return "?";
}

// Primes --------------------------------------------------------------------

std::vector<std::uint64_t> sieve_primes(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  primes.push_back(2);
  if (limit < 3) return primes;

  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit)));
  while (root * root > limit) --root;
  while ((root + 1) * (root + 1) <= limit) ++root;

  // Small odd primes up to root.
  std::vector<std::uint8_t> small(root + 1, 1);
  std::vector<std::uint64_t> base;
  for (std::uint64_t i = 3; i <= root; i += 2) {
    if (!small[i]) continue;
    base.push_back(i);
    for (std::uint64_t j = i * i; j <= root; j += 2 * i) small[j] = 0;
  }

  // Odd numbers only: index k stands for low + 2k.
  constexpr std::uint64_t kSegment = 1u << 18;
  std::vector<std::uint8_t> segment(kSegment);
  std::vector<std::uint64_t> next(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) next[i] = base[i] * base[i];

  for (std::uint64_t low = 3; low <= limit; low += 2 * kSegment) {
    const std::uint64_t high = std::min(limit, low + 2 * kSegment - 1);
    const std::uint64_t slots = (high - low) / 2 + 1;
    std::fill(segment.begin(), segment.begin() + static_cast<std::ptrdiff_t>(slots), 1);
    for (std::size_t i = 0; i < base.size(); ++i) {
      std::uint64_t j = next[i];
      const std::uint64_t step = 2 * base[i];
      for (; j <= high; j += step) segment[(j - low) / 2] = 0;
      next[i] = j;
    }
    for (std::uint64_t k = 0; k < slots; ++k)
      if (segment[k]) primes.push_back(low + 2 * k);
  }
  return primes;
}

std::uint64_t necklace_count(std::uint64_t q, unsigned n) {
  if (q < 2 || n < 1) throw ParameterError("necklace_count needs q >= 2 and n >= 1");
  auto mobius = [](unsigned d) {
    int mu = 1;
    for (unsigned p = 2; p * p <= d; ++p) {
      if (d % p) continue;
      d /= p;
      if (d % p == 0) return 0;
      mu = -mu;
    }
    return d > 1 ? -mu : mu;
  };
  __int128 total = 0;
  for (unsigned d = 1; d <= n; ++d) {
    if (n % d) continue;
    const int mu = mobius(d);
    if (mu == 0) continue;
    __int128 power = 1;
    for (unsigned i = 0; i < n / d; ++i) {
      power *= q;
      if (power > (static_cast<__int128>(1) << 100)) throw OverflowError("necklace_count overflow");
    }
    total += mu * power;
  }
  return static_cast<std::uint64_t>(total / n);
}

int kronecker_symbol(int discriminant, std::uint64_t p) {
  if (p == 2) {
    if (discriminant % 2 == 0) return 0;
    const int r = ((discriminant % 8) + 8) % 8;
    return (r == 1 || r == 7) ? 1 : -1;
  }
  const std::uint64_t a = static_cast<std::uint64_t>(
      ((static_cast<long long>(discriminant) % static_cast<long long>(p)) + static_cast<long long>(p)) %
      static_cast<long long>(p));
  if (a == 0) return 0;
  return powmod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

bool is_fundamental_discriminant(int d) {
  if (d == 0 || d == 1) return false;
  const int r = ((d % 4) + 4) % 4;
  if (r == 1) return is_squarefree(d);
  if (r == 0) {
    const int m = d / 4;
    const int mr = ((m % 4) + 4) % 4;
    return (mr == 2 || mr == 3) && is_squarefree(m);
  }
  return false;
}

// Prime listing is memory-bound; beyond this the sieve alone needs gigabytes.
constexpr std::uint64_t kMaxPrimeLimit = 1'000'000'000;

static void check_prime_limit(std::uint64_t limit) {
  if (limit > kMaxPrimeLimit)
    throw BudgetExceeded("listing primes up to " + std::to_string(limit) + " exceeds the limit of " +
                         std::to_string(kMaxPrimeLimit));
}

std::vector<PrimeEntry> list_primes(const PrimeSystem& system, std::uint64_t limit) {
  check_prime_limit(limit);
  std::vector<PrimeEntry> out;
  switch (system.kind()) {
    case SystemKind::Integers:
      for (const auto p : sieve_primes(limit)) out.push_back({p, std::to_string(p)});
      return out;
    case SystemKind::PolyOverFq: {
      const unsigned q = system.q();
      const FiniteField field(q);
      const unsigned top = max_degree(q, limit);
      const auto codes = irreducible_codes(field, top);
      for (unsigned d = 1; d <= top; ++d) {
        const std::uint64_t norm = ipow(q, d);
        const std::size_t first = out.size();
        for (const auto code : codes[d]) out.push_back({norm, format_poly(MonicPoly{d, code}, q)});
        std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
      }
      return out;
    }
    case SystemKind::QuadraticField:
      quadratic_primes(system.discriminant(), limit,
                       [&](std::uint64_t norm, std::string label) { out.push_back({norm, std::move(label)}); });
      std::sort(out.begin(), out.end());
      return out;
    case SystemKind::Beurling: {
      const auto norms = system.beurling_norms();
      for (std::size_t i = 0; i < norms.size() && norms[i] <= limit; ++i)
        out.push_back({norms[i], "beurling#" + std::to_string(i)});
      // Labels compare lexicographically, so restore (norm, label) order.
      std::sort(out.begin(), out.end());
      return out;
    }
  }
  return out;
}

std::vector<std::uint64_t> prime_norms(const PrimeSystem& system, std::uint64_t limit) {
  check_prime_limit(limit);
  switch (system.kind()) {
    case SystemKind::Integers:
      return sieve_primes(limit);
    case SystemKind::PolyOverFq: {
      const unsigned q = system.q();
      const unsigned top = max_degree(q, limit);
      std::vector<std::uint64_t> norms;
      if (top == 0) return norms;
      const auto codes = irreducible_codes(FiniteField(q), top);
      for (unsigned d = 1; d <= top; ++d) norms.insert(norms.end(), codes[d].size(), ipow(q, d));
      return norms;
    }
    case SystemKind::QuadraticField: {
      std::vector<std::uint64_t> norms;
      const int disc = system.discriminant();
      for (const std::uint64_t p : sieve_primes(limit)) {
        const int k = kronecker_symbol(disc, p);
        if (k == 1) norms.insert(norms.end(), 2, p);
        else if (k == 0) norms.push_back(p);
        else if (p <= limit / p) norms.push_back(p * p);
      }
      std::sort(norms.begin(), norms.end());
      return norms;
    }
    case SystemKind::Beurling: {
      const auto all = system.beurling_norms();
      const auto end = std::upper_bound(all.begin(), all.end(), limit);
      return {all.begin(), end};
    }
  }
  return {};
}

// Condition checks ----------------------------------------------------------

std::uint64_t count_elements(const PrimeSystem& system, std::uint64_t limit,
                             const ExecutionOptions& options) {
  if (system.kind() == SystemKind::Integers) return limit;
  return CountingTable(system, limit, options).total();
}

bool is_supported_threshold(const PrimeSystem& system, std::uint64_t limit) {
  if (system.kind() != SystemKind::PolyOverFq) return true;
  const unsigned d = max_degree(system.q(), limit);
  return ipow(system.q(), d) == limit;
}

namespace {

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace

DensityFit density_fit(const PrimeSystem& system, std::span<const std::uint64_t> grid,
                       const ExecutionOptions& options) {
  DensityFit fit;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw ParameterError("density grid thresholds must be >= 1");
    if (i > 0 && grid[i] <= grid[i - 1]) throw ParameterError("density grid must be strictly increasing");
    if (is_supported_threshold(system, grid[i])) fit.grid.push_back(grid[i]);
    else fit.unsupported.push_back(grid[i]);
  }
  if (fit.grid.size() < 4) {
    throw ParameterError("density_fit needs at least 4 supported grid points, got " +
                         std::to_string(fit.grid.size()));
  }

  const std::uint64_t top = fit.grid.back();
  std::vector<std::uint64_t> counts;
  if (system.kind() == SystemKind::Integers) {
    counts.assign(fit.grid.begin(), fit.grid.end());
  } else {
    const CountingTable table(system, top, options);
    for (const auto x : fit.grid) counts.push_back(table.count(x));
  }

  fit.a_hat = static_cast<double>(counts.back()) / static_cast<double>(top);

  std::vector<double> log_x, log_r;
  for (std::size_t i = 0; i < fit.grid.size(); ++i) {
    const double x = static_cast<double>(fit.grid[i]);
    const double r = static_cast<double>(counts[i]) - fit.a_hat * x;
    fit.residuals.push_back({fit.grid[i], counts[i], r});
    if (std::abs(r) > 1e-9 * std::max(1.0, x)) {
      log_x.push_back(std::log(x));
      log_r.push_back(std::log(std::abs(r)));
    }
  }

  std::vector<double> upper_x, upper_c;
  for (std::size_t i = fit.grid.size() / 2; i < fit.grid.size(); ++i) {
    upper_x.push_back(std::log(static_cast<double>(fit.grid[i])));
    upper_c.push_back(std::log(static_cast<double>(counts[i])));
  }
  fit.growth_exponent = least_squares_slope(upper_x, upper_c);

  if (log_x.empty()) {
    fit.b_hat = 0.0;
    fit.status = FitStatus::Exact;
  } else {
    fit.b_hat = log_x.size() >= 2 ? least_squares_slope(log_x, log_r) : 0.0;
    fit.status = FitStatus::Ok;
  }
  if (!(fit.a_hat > 0.0) || fit.b_hat >= 1.0 || fit.growth_exponent < 0.9) fit.status = FitStatus::Failed;
  return fit;
}

double prime_count_check(const PrimeSystem& system, std::uint64_t limit) {
  if (limit < 3) throw ParameterError("prime_count_check needs X >= 3");
  const double x = static_cast<double>(limit);
  return static_cast<double>(prime_norms(system, limit).size()) * std::log(x) / x;
}

MertensSum mertens_sum(const PrimeSystem& system, std::uint64_t limit) {
  if (limit < 3) throw ParameterError("mertens_sum needs X >= 3");
  // Neumaier-compensated so that large X does not drift in the last digits.
  double sum = 0.0, compensation = 0.0;
  for (const auto n : prime_norms(system, limit)) {
    const double term = 1.0 / static_cast<double>(n);
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) compensation += (sum - t) + term;
    else compensation += (term - t) + sum;
    sum = t;
  }
  MertensSum out;
  out.sum = sum + compensation;
  out.deviation = out.sum - std::log(std::log(static_cast<double>(limit)));
  return out;
}

void write_primes_csv(std::ostream& out, std::span<const PrimeEntry> primes) {
  out << "norm,label\n";
  for (const auto& p : primes) out << p.norm << ',' << p.label << '\n';
}

}  // namespace mldp
