#include "mldp/monoid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>

#include "mldp/errors.hpp"
#include "mldp/report.hpp"

namespace mldp {
namespace {

void check_limit(const PrimeSystem& system, std::uint64_t limit, const Budget& budget, bool sieve) {
  if (limit >= (std::uint64_t{1} << 62)) throw OverflowError("limit exceeds the 64-bit norm range");
  const std::uint64_t cap = (system.kind() == SystemKind::Integers && sieve)
                                ? budget.max_limit_integers
                                : budget.max_limit_general;
  if (limit > cap) {
    throw BudgetExceeded("X = " + std::to_string(limit) + " exceeds the enumeration budget of " +
                         std::to_string(cap) + " for " + system.spec());
  }
}

bool element_less(const MonoidElement& a, const MonoidElement& b) {
  if (a.norm != b.norm) return a.norm < b.norm;
  if (a.omega != b.omega) return a.omega < b.omega;
  return a.gsum < b.gsum;
}

struct Recursion {
  std::uint64_t limit;
  std::span<const std::uint64_t> norms;
  std::span<const double> values;
  std::uint64_t max_elements;
  std::atomic<std::uint64_t>* produced;

  // Elements whose smallest prime index is >= start, times the partial product.
  void descend(std::size_t start, std::uint64_t n, std::uint32_t omega, double s,
               std::vector<MonoidElement>& out) const {
    for (std::size_t j = start; j < norms.size(); ++j) {
      const std::uint64_t norm = norms[j];
      if (n > limit / norm) break;
      std::uint64_t m = n * norm;
      const std::uint32_t w = omega + 1;
      const double t = s + values[j];
      while (true) {
        emit(out, {m, w, t});
        descend(j + 1, m, w, t, out);
        if (m > limit / norm) break;
        m *= norm;
      }
    }
  }

  void emit(std::vector<MonoidElement>& out, const MonoidElement& e) const {
    out.push_back(e);
    if ((out.size() & 0xFFFF) == 0 && produced->fetch_add(0x10000) + 0x10000 > max_elements)
      throw BudgetExceeded("enumeration exceeded the element budget of " + std::to_string(max_elements));
  }
};

std::vector<MonoidElement> enumerate_recursive(std::uint64_t limit, std::span<const std::uint64_t> norms,
                                               std::span<const double> values,
                                               const ExecutionOptions& options) {
  // One task per (first prime, exponent) subtree.
  struct Task {
    std::size_t index;
    std::uint64_t power;
  };
  std::vector<Task> tasks;
  for (std::size_t j = 0; j < norms.size() && norms[j] <= limit; ++j) {
    std::uint64_t m = norms[j];
    while (true) {
      tasks.push_back({j, m});
      if (m > limit / norms[j]) break;
      m *= norms[j];
    }
  }

  std::atomic<std::uint64_t> produced{0};
  const Recursion rec{limit, norms, values, options.budget.max_elements, &produced};
  std::vector<std::vector<MonoidElement>> parts(tasks.size());
  parallel_for(tasks.size(), options.resolved_threads(), [&](std::size_t i) {
    const Task& task = tasks[i];
    const double v = values[task.index];
    rec.emit(parts[i], {task.power, 1, v});
    rec.descend(task.index + 1, task.power, 1, v, parts[i]);
  });

  std::size_t total = 1;
  for (const auto& p : parts) total += p.size();
  if (total > options.budget.max_elements)
    throw BudgetExceeded("enumeration exceeded the element budget of " +
                         std::to_string(options.budget.max_elements));

  std::vector<MonoidElement> elements;
  elements.reserve(total);
  elements.push_back({1, 0, 0.0});
  for (auto& p : parts) {
    elements.insert(elements.end(), p.begin(), p.end());
    std::vector<MonoidElement>().swap(p);
  }
  std::sort(elements.begin(), elements.end(), element_less);
  return elements;
}

std::vector<MonoidElement> enumerate_sieve(std::uint64_t limit, std::span<const std::uint64_t> primes,
                                           std::span<const double> values,
                                           const ExecutionOptions& options) {
  if (limit > options.budget.max_elements)
    throw BudgetExceeded("X = " + std::to_string(limit) + " exceeds the element budget");
  std::vector<MonoidElement> elements(limit);
  for (std::uint64_t n = 1; n <= limit; ++n) elements[n - 1] = {n, 0, 0.0};

  // Every element receives its g-values in increasing prime order whatever
  // the block split, so the result does not depend on the thread count.
  const unsigned threads = options.resolved_threads();
  const std::uint64_t block_count = std::min<std::uint64_t>(limit, 4ull * threads);
  const std::uint64_t kBlock = (limit + block_count - 1) / block_count;
  const std::size_t blocks = static_cast<std::size_t>((limit + kBlock - 1) / kBlock);
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::uint64_t lo = b * kBlock + 1;
    const std::uint64_t hi = std::min(limit, lo + kBlock - 1);
    for (std::size_t i = 0; i < primes.size() && primes[i] <= hi; ++i) {
      const std::uint64_t p = primes[i];
      const double v = values[i];
      for (std::uint64_t m = (lo + p - 1) / p * p; m <= hi; m += p) {
        MonoidElement& e = elements[m - 1];
        ++e.omega;
        e.gsum += v;
      }
    }
  });
  return elements;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes; i-- > 0;) v = (v << 8) | p[i];
  return v;
}

constexpr char kMagic[8] = {'M', 'L', 'D', 'P', '0', '0', '0', '1'};

}  // namespace

// CountingTable -------------------------------------------------------------

CountingTable::CountingTable(const PrimeSystem& system, std::uint64_t limit,
                             const ExecutionOptions& options)
    : limit_(limit), closed_form_(system.kind() == SystemKind::Integers) {
  if (closed_form_) return;
  check_limit(system, limit, options.budget, false);
  prefix_.assign(limit + 1, 0);
  if (limit >= 1) prefix_[1] = 1;
  for (const std::uint64_t norm : prime_norms(system, limit)) {
    for (std::uint64_t n = norm, k = 1; n <= limit; n += norm, ++k) prefix_[n] += prefix_[k];
  }
  for (std::uint64_t n = 1; n <= limit; ++n) prefix_[n] += prefix_[n - 1];
}

std::uint64_t CountingTable::count(std::uint64_t y) const {
  if (y > limit_) throw ParameterError("count requested beyond the table limit");
  return closed_form_ ? y : prefix_[y];
}

// Enumeration ---------------------------------------------------------------

void require_enumerable(const PrimeSystem& system, std::uint64_t limit, const ExecutionOptions& options,
                        EnumerationPath path) {
  const bool integers = system.kind() == SystemKind::Integers;
  const bool sieve = path == EnumerationPath::Sieve || (path == EnumerationPath::Automatic && integers);
  check_limit(system, limit, options.budget, sieve);
}

MonoidTable enumerate_with_values(const PrimeSystem& system, std::uint64_t limit,
                                  std::span<const double> prime_values, const ExecutionOptions& options,
                                  EnumerationPath path) {
  const bool integers = system.kind() == SystemKind::Integers;
  if (path == EnumerationPath::Sieve && !integers)
    throw ParameterError("the sieve path is only available for the integers");
  const bool sieve = path == EnumerationPath::Sieve || (path == EnumerationPath::Automatic && integers);
  check_limit(system, limit, options.budget, sieve);

  const auto norms = prime_norms(system, limit);
  if (prime_values.size() != norms.size())
    throw ParameterError("prime value count does not match the prime list");

  MonoidTable table{system, limit, {}};
  if (limit == 0) return table;
  table.elements = sieve ? enumerate_sieve(limit, norms, prime_values, options)
                         : enumerate_recursive(limit, norms, prime_values, options);
  return table;
}

MonoidTable enumerate(const PrimeSystem& system, std::uint64_t limit, const AdditiveFunction& g,
                      const ExecutionOptions& options, EnumerationPath path) {
  if (path == EnumerationPath::Sieve && system.kind() != SystemKind::Integers)
    throw ParameterError("the sieve path is only available for the integers");
  require_enumerable(system, limit, options, path);
  const auto norms = prime_norms(system, limit);
  const auto values = g.values_for(norms);
  return enumerate_with_values(system, limit, values, options, path);
}

Histogram histogram(const MonoidTable& table, Statistic statistic, double width) {
  if (table.elements.empty()) throw ParameterError("histogram of an empty table");
  if (width < 0 || !std::isfinite(width)) throw ParameterError("histogram bin width must be >= 0");
  Histogram h;
  h.exact = width == 0.0;
  h.width = h.exact ? 1.0 : width;
  h.total = table.count();

  auto value_of = [statistic](const MonoidElement& e) {
    return statistic == Statistic::Omega ? static_cast<double>(e.omega) : e.gsum;
  };
  std::map<double, std::uint64_t> bins;
  for (const auto& e : table.elements) {
    const double v = value_of(e);
    if (h.exact) {
      if (v != std::floor(v)) {
        throw NonIntegerStatistic("exact-integer binning requested but gsum = " + format_number(v) +
                                  " at norm " + std::to_string(e.norm));
      }
      ++bins[v];
    } else {
      ++bins[std::floor(v / width) * width];
    }
  }
  h.bins.assign(bins.begin(), bins.end());
  return h;
}

void write_table_csv(std::ostream& out, const MonoidTable& table) {
  out << "norm,omega,gsum\n";
  for (const auto& e : table.elements) out << e.norm << ',' << e.omega << ',' << format_number(e.gsum) << '\n';
}

void write_table_binary(const std::filesystem::path& path, const MonoidTable& table) {
  if (table.elements.size() > 0xFFFFFFFFull) throw OverflowError("table too large for the binary cache");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SourceError("cannot write '" + path.string() + "'");
  out.write(kMagic, 8);
  put_u32(out, kTableCacheVersion);
  put_u32(out, static_cast<std::uint32_t>(table.elements.size()));
  for (const auto& e : table.elements) {
    put_u64(out, e.norm);
    put_u32(out, e.omega);
    std::uint64_t bits = 0;
    std::memcpy(&bits, &e.gsum, sizeof bits);
    put_u64(out, bits);
  }
  if (!out) throw SourceError("write error on '" + path.string() + "'");
}

std::vector<MonoidElement> read_table_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SourceError("cannot open '" + path.string() + "'");
  unsigned char header[16];
  if (!in.read(reinterpret_cast<char*>(header), 16)) throw SourceError("truncated table cache header");
  if (std::memcmp(header, kMagic, 8) != 0) throw SourceError("bad table cache magic");
  const auto version = static_cast<std::uint32_t>(get_le(header + 8, 4));
  if (version != kTableCacheVersion) throw SourceError("unsupported table cache version " + std::to_string(version));
  const auto count = static_cast<std::uint32_t>(get_le(header + 12, 4));

  std::vector<MonoidElement> elements;
  elements.reserve(count);
  unsigned char record[20];
  for (std::uint32_t i = 0; i < count; ++i) {
    if (!in.read(reinterpret_cast<char*>(record), 20)) throw SourceError("truncated table cache");
    MonoidElement e;
    e.norm = get_le(record, 8);
    e.omega = static_cast<std::uint32_t>(get_le(record + 8, 4));
    const std::uint64_t bits = get_le(record + 12, 8);
    std::memcpy(&e.gsum, &bits, sizeof bits);
    elements.push_back(e);
  }
  return elements;
}

}  // namespace mldp
