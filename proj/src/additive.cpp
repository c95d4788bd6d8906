#include "mldp/additive.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "mldp/errors.hpp"

namespace mldp {
namespace {

double parse_double(std::string_view text, const char* what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ParameterError(std::string("invalid ") + what + ": '" + std::string(text) + "'");
  return value;
}

std::uint64_t parse_u64(std::string_view text, const char* what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ParameterError(std::string("invalid ") + what + ": '" + std::string(text) + "'");
  return value;
}

// Shortest representation that parses back to the same double.
std::string exact_repr(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = s.find(sep);
    parts.push_back(s.substr(0, pos));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return parts;
}

void check_value(double v) {
  if (!std::isfinite(v) || v < 0.0)
    throw ParameterError("additive function values must be finite and non-negative, got " + exact_repr(v));
}

struct Fraction {
  mpz_class num;
  mpz_class den;
};

// sum count_i / norm_i over [lo, hi) by binary splitting; no reductions
// until the end, so cost is dominated by a few large multiplications.
Fraction split_sum(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& terms, std::size_t lo,
                   std::size_t hi) {
  if (hi - lo == 1) {
    Fraction f;
    mpz_set_ui(f.num.get_mpz_t(), terms[lo].second);
    mpz_set_ui(f.den.get_mpz_t(), terms[lo].first);
    return f;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  Fraction a = split_sum(terms, lo, mid);
  Fraction b = split_sum(terms, mid, hi);
  Fraction out;
  out.num = a.num * b.den + b.num * a.den;
  out.den = a.den * b.den;
  return out;
}

}  // namespace

// AdditiveFunction ----------------------------------------------------------

AdditiveFunction::AdditiveFunction(std::variant<Omega, NormResidue, TableLookup> rule)
    : rule_(std::move(rule)) {}

AdditiveFunction AdditiveFunction::omega() { return AdditiveFunction(Omega{}); }

AdditiveFunction AdditiveFunction::norm_residue(std::uint64_t modulus, std::set<std::uint64_t> residues,
                                                double value_in, double value_out) {
  if (modulus == 0) throw ParameterError("residue modulus must be >= 1");
  check_value(value_in);
  check_value(value_out);
  std::set<std::uint64_t> reduced;
  for (const auto r : residues) reduced.insert(r % modulus);
  return AdditiveFunction(NormResidue{modulus, std::move(reduced), value_in, value_out});
}

AdditiveFunction AdditiveFunction::table_lookup(std::map<std::uint64_t, double> values, double fallback) {
  check_value(fallback);
  for (const auto& [norm, v] : values) check_value(v);
  return AdditiveFunction(TableLookup{std::move(values), fallback});
}

AdditiveFunction AdditiveFunction::parse(std::string_view spec) {
  if (spec == "omega") return omega();
  const auto parts = split(spec, ':');
  if (parts[0] == "residue" && parts.size() == 5) {
    std::set<std::uint64_t> residues;
    for (const auto r : split(parts[2], '/')) residues.insert(parse_u64(r, "residue"));
    return norm_residue(parse_u64(parts[1], "modulus"), std::move(residues),
                        parse_double(parts[3], "value"), parse_double(parts[4], "value"));
  }
  if (parts[0] == "table" && parts.size() == 3) {
    std::map<std::uint64_t, double> values;
    if (!parts[1].empty()) {
      for (const auto item : split(parts[1], ',')) {
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ParameterError("table entries look like NORM=VALUE");
        values[parse_u64(item.substr(0, eq), "norm")] = parse_double(item.substr(eq + 1), "value");
      }
    }
    return table_lookup(std::move(values), parse_double(parts[2], "default value"));
  }
  throw ParameterError("unknown additive function '" + std::string(spec) +
                       "' (expected omega, residue:M:R1/R2:VIN:VOUT or table:N=V,...:DEFAULT)");
}

double AdditiveFunction::value(std::uint64_t norm) const {
  return std::visit(
      [norm](const auto& rule) -> double {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, Omega>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, NormResidue>) {
          return rule.residues.count(norm % rule.modulus) ? rule.value_in : rule.value_out;
        } else {
          const auto it = rule.values.find(norm);
          return it == rule.values.end() ? rule.fallback : it->second;
        }
      },
      rule_);
}

std::string AdditiveFunction::spec() const {
  return std::visit(
      [](const auto& rule) -> std::string {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, Omega>) {
          return "omega";
        } else if constexpr (std::is_same_v<T, NormResidue>) {
          std::string out = "residue:" + std::to_string(rule.modulus) + ":";
          bool first = true;
          for (const auto r : rule.residues) {
            if (!first) out += '/';
            out += std::to_string(r);
            first = false;
          }
          return out + ":" + exact_repr(rule.value_in) + ":" + exact_repr(rule.value_out);
        } else {
          std::string out = "table:";
          bool first = true;
          for (const auto& [norm, v] : rule.values) {
            if (!first) out += ',';
            out += std::to_string(norm) + "=" + exact_repr(v);
            first = false;
          }
          return out + ":" + exact_repr(rule.fallback);
        }
      },
      rule_);
}

std::vector<double> AdditiveFunction::values_for(std::span<const std::uint64_t> norms) const {
  std::vector<double> out;
  out.reserve(norms.size());
  for (const auto n : norms) out.push_back(value(n));
  return out;
}

// DiscreteMeasure -----------------------------------------------------------

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw ParameterError("a measure needs at least one atom");
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.y < b.y; });
  double mass = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (!std::isfinite(a.y)) throw ParameterError("atom locations must be finite");
    if (!(a.w > 0.0) || !std::isfinite(a.w)) throw ParameterError("atom weights must be positive");
    if (i > 0 && atoms_[i - 1].y == a.y) throw ParameterError("duplicate atom at y = " + exact_repr(a.y));
    mass += a.w;
  }
  if (std::abs(mass - 1.0) > 1e-12)
    throw ParameterError("atom weights sum to " + exact_repr(mass) + ", not 1");
}

DiscreteMeasure DiscreteMeasure::delta(double y) { return DiscreteMeasure({{y, 1.0}}); }

DiscreteMeasure DiscreteMeasure::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("atoms") || !doc["atoms"].is_array())
    throw ParameterError(R"(measure JSON must look like {"atoms": [{"y": ..., "w": ...}]})");
  std::vector<Atom> atoms;
  for (const auto& item : doc["atoms"]) {
    if (!item.is_object() || !item.contains("y") || !item.contains("w") || !item["y"].is_number() ||
        !item["w"].is_number())
      throw ParameterError("every atom needs numeric y and w");
    atoms.push_back({item["y"].get<double>(), item["w"].get<double>()});
  }
  return DiscreteMeasure(std::move(atoms));
}

DiscreteMeasure DiscreteMeasure::load(const std::string& path_or_alias) {
  if (path_or_alias == "delta1") return delta(1.0);
  std::ifstream in(path_or_alias);
  if (!in) throw SourceError("cannot open measure file '" + path_or_alias + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw SourceError("malformed measure JSON in '" + path_or_alias + "': " + e.what());
  }
  try {
    return from_json(doc);
  } catch (const ParameterError& e) {
    throw SourceError(path_or_alias + ": " + e.what());
  }
}

nlohmann::json DiscreteMeasure::to_json() const {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : atoms_) atoms.push_back({{"y", a.y}, {"w", a.w}});
  return {{"atoms", atoms}};
}

double DiscreteMeasure::mean() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.w * a.y;
  return m;
}

double DiscreteMeasure::min_support() const { return atoms_.front().y; }
double DiscreteMeasure::max_support() const { return atoms_.back().y; }

double to_double(const Rational& value) {
  const mpz_class& num = value.get_num();
  const mpz_class& den = value.get_den();
  if (num == 0) return 0.0;
  const bool negative = num < 0;
  const mpz_class a = negative ? mpz_class(-num) : num;
  // Scale so the integer quotient carries 55-56 significant bits.
  const long shift = 55 + static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2)) -
                     static_cast<long>(mpz_sizeinbase(a.get_mpz_t(), 2));
  mpz_class q, r;
  if (shift >= 0) {
    const mpz_class scaled = a << static_cast<mp_bitcnt_t>(shift);
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
  } else {
    const mpz_class scaled = den << static_cast<mp_bitcnt_t>(-shift);
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), scaled.get_mpz_t());
  }
  const bool sticky = r != 0;
  const long extra = static_cast<long>(mpz_sizeinbase(q.get_mpz_t(), 2)) - 53;
  const mpz_class low = q & ((mpz_class(1) << static_cast<mp_bitcnt_t>(extra)) - 1);
  const mpz_class half = mpz_class(1) << static_cast<mp_bitcnt_t>(extra - 1);
  mpz_class mantissa = q >> static_cast<mp_bitcnt_t>(extra);
  if (low > half || (low == half && (sticky || mpz_odd_p(mantissa.get_mpz_t())))) ++mantissa;
  const double m = static_cast<double>(mantissa.get_ui());
  const double out = std::ldexp(m, static_cast<int>(extra - shift));
  return negative ? -out : out;
}

// Empirical measures --------------------------------------------------------

Rational reciprocal_sum(std::span<const std::uint64_t> norms) {
  std::map<std::uint64_t, std::uint64_t> multiplicity;
  for (const auto n : norms) {
    if (n == 0) throw ParameterError("reciprocal of zero norm");
    ++multiplicity[n];
  }
  if (multiplicity.empty()) return Rational(0);
  const std::vector<std::pair<std::uint64_t, std::uint64_t>> terms(multiplicity.begin(), multiplicity.end());
  Fraction f = split_sum(terms, 0, terms.size());
  Rational r(f.num, f.den);
  r.canonicalize();
  return r;
}

EmpiricalMeasure rho_X(const PrimeSystem& system, const AdditiveFunction& g, std::uint64_t limit) {
  const auto norms = prime_norms(system, limit);
  if (norms.empty())
    throw EmptySystem("no prime of " + system.spec() + " has norm <= " + std::to_string(limit));

  std::map<double, std::vector<std::uint64_t>> groups;
  for (const auto n : norms) groups[g.value(n)].push_back(n);

  std::vector<Rational> weights;
  Rational total(0);
  for (const auto& [y, members] : groups) {
    weights.push_back(reciprocal_sum(members));
    total += weights.back();
  }

  EmpiricalMeasure out;
  out.limit = limit;
  out.denominator = to_double(total);
  std::vector<Atom> atoms;
  std::size_t i = 0;
  for (const auto& [y, members] : groups) {
    Rational w = weights[i++] / total;
    atoms.push_back({y, to_double(w)});
    out.exact_weights.push_back(std::move(w));
  }
  out.base = DiscreteMeasure(std::move(atoms));
  return out;
}

double exp_moment(const DiscreteMeasure& measure, double theta) {
  // Total mass is 1 by construction.
  if (theta == 0.0) return 1.0;
  double sum = 0.0;
  for (const auto& a : measure.atoms()) sum += a.w * std::exp(theta * a.y);
  return sum;
}

std::vector<ConvergenceRow> check_convergence(const PrimeSystem& system, const AdditiveFunction& g,
                                              const DiscreteMeasure& rho, std::span<const double> thetas,
                                              std::span<const std::uint64_t> limits) {
  if (thetas.empty() || limits.empty()) throw ParameterError("check_convergence needs nonempty grids");
  std::vector<ConvergenceRow> rows;
  for (const auto limit : limits) {
    const EmpiricalMeasure empirical = rho_X(system, g, limit);
    for (const double theta : thetas) {
      ConvergenceRow row;
      row.limit = limit;
      row.theta = theta;
      row.empirical = exp_moment(empirical.base, theta);
      row.limiting = exp_moment(rho, theta);
      row.deviation = std::abs(row.empirical - row.limiting);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace mldp
