#include "mldp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mldp/errors.hpp"
#include "mldp/experiments.hpp"

namespace mldp {
namespace {

namespace fs = std::filesystem;

struct CommandInfo {
  const char* name;
  const char* help;
};

constexpr CommandInfo kCommands[] = {
    {"primes", "list the primes of norm <= X"},
    {"count", "count monoid elements of norm <= X (optionally cache the table)"},
    {"density", "fit count(X) = aX + O(X^b) over --grid"},
    {"mertens", "sum of 1/N(p) and its deviation from log log X"},
    {"expect", "exact E[Z_p1...Z_pk] and E[Y_p1...Y_pk]"},
    {"dominate", "largest observed E[Z]/E[Y] over prime tuples"},
    {"mgf-gap", "gap between the MGFs of Z and Y over B(X,C)"},
    {"tail-mass", "finite-X tail mass of primes with g(p) > C"},
    {"rate", "Legendre-Fenchel rate function I(x) over --grid"},
    {"ek", "Kolmogorov-Smirnov distance of normalized omega to N(0,1)"},
    {"ldp-scan", "exact tail probabilities against -inf I over intervals"},
    {"sweep", "density, prime-count, Mertens and convergence checks"},
};

// Options that never enter config-echo.json: they do not change the report.
const std::set<std::string> kNotEchoed = {"threads", "out", "config"};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_real(const std::string& text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ParameterError("not a number: '" + text + "'");
  return v;
}

std::uint64_t parse_count(const std::string& text) {
  // Accept 1e6 style as long as the value is integral.
  const double v = parse_real(text);
  if (!(v >= 0.0) || v > 1.8e19 || std::floor(v) != v) throw ParameterError("not a non-negative integer: '" + text + "'");
  std::uint64_t n = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec == std::errc{} && ptr == text.data() + text.size()) return n;
  return static_cast<std::uint64_t>(v);
}

// "a,b,c" or "geom:start:stop:steps".
std::vector<double> parse_real_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.rfind("geom:", 0) == 0) {
    const auto parts = split(text.substr(5), ':');
    if (parts.size() != 3) throw ParameterError("geometric grids look like geom:START:STOP:STEPS");
    const double start = parse_real(parts[0]), stop = parse_real(parts[1]);
    const auto steps = parse_count(parts[2]);
    if (!(start > 0.0) || !(stop >= start) || steps < 1)
      throw ParameterError("geometric grid needs 0 < START <= STOP and STEPS >= 1");
    if (steps == 1) return {start};
    const double ratio = std::log(stop / start) / static_cast<double>(steps - 1);
    for (std::uint64_t i = 0; i < steps; ++i)
      grid.push_back(i + 1 == steps ? stop : start * std::exp(ratio * static_cast<double>(i)));
    return grid;
  }
  for (const auto& item : split(text, ',')) {
    if (item.empty()) throw ParameterError("empty grid entry in '" + text + "'");
    grid.push_back(parse_real(item));
  }
  if (grid.empty()) throw ParameterError("empty grid");
  return grid;
}

std::vector<std::uint64_t> parse_limit_grid(const std::string& text) {
  std::vector<std::uint64_t> grid;
  if (text.rfind("geom:", 0) == 0) {
    for (const double v : parse_real_grid(text)) {
      const auto n = static_cast<std::uint64_t>(std::llround(v));
      if (grid.empty() || grid.back() != n) grid.push_back(n);
    }
    return grid;
  }
  for (const auto& item : split(text, ',')) grid.push_back(parse_count(item));
  if (grid.empty()) throw ParameterError("empty grid");
  return grid;
}

Interval parse_interval(const std::string& text) {
  // LO:HI is closed, LO:HI) is half-open on the right.
  std::string body = text;
  Interval a;
  if (!body.empty() && body.back() == ')') {
    a.include_hi = false;
    body.pop_back();
  }
  const auto colon = body.find(':');
  if (colon == std::string::npos) throw ParameterError("intervals look like LO:HI or LO:HI)");
  a.lo = parse_real(body.substr(0, colon));
  a.hi = parse_real(body.substr(colon + 1));
  if (std::isnan(a.lo) || std::isnan(a.hi) || a.lo > a.hi) throw ParameterError("interval '" + text + "' is empty");
  return a;
}

struct Settings {
  std::string command;
  std::string system = "integers";
  std::string limit;
  std::string grid;
  std::string g = "omega";
  std::string rho = "delta1";
  std::string theta = "1";
  std::string cap = "5";
  std::string primes;
  std::string kmax = "3";
  std::string min_norm = "3";
  std::string theta_grid = "1";
  std::string table_out;
  std::vector<std::string> intervals;
  std::string out;
  std::string format = "csv";
  std::string seed = "0";
  unsigned threads = 0;
};

std::vector<std::uint64_t> limits_of(const Settings& s) {
  if (!s.grid.empty()) return parse_limit_grid(s.grid);
  if (!s.limit.empty()) return {parse_count(s.limit)};
  throw CLI::ValidationError(s.command + " needs --limit or --grid");
}

std::uint64_t limit_of(const Settings& s) {
  if (s.limit.empty()) throw CLI::ValidationError(s.command + " needs --limit");
  return parse_count(s.limit);
}

Report run_command(const Settings& s, const ExecutionOptions& opts) {
  const std::string& cmd = s.command;
  Report r;
  r.command = cmd;

  if (cmd == "rate") {
    if (s.grid.empty()) throw CLI::ValidationError("rate needs --grid");
    const auto rho = DiscreteMeasure::load(s.rho);
    auto grid = parse_real_grid(s.grid);
    std::sort(grid.begin(), grid.end());
    return to_report(rate_profile(rho, grid));
  }

  const PrimeSystem system = PrimeSystem::parse(s.system);
  const AdditiveFunction g = AdditiveFunction::parse(s.g);

  if (cmd == "primes") {
    ReportTable t{"primes", {"norm", "label"}, {}};
    for (const auto& p : list_primes(system, limit_of(s))) t.rows.push_back({p.norm, p.label});
    r.tables.push_back(std::move(t));
  } else if (cmd == "count") {
    ReportTable t{"count", {"X", "count"}, {}};
    for (const auto x : limits_of(s)) t.rows.push_back({x, count_elements(system, x, opts)});
    if (!s.table_out.empty()) {
      const auto x = limits_of(s).back();
      const MonoidTable table = enumerate(system, x, g, opts);
      write_table_binary(s.table_out, table);
      ReportTable h{"omega_histogram", {"omega", "count"}, {}};
      for (const auto& [v, c] : histogram(table, Statistic::Omega).bins)
        h.rows.push_back({static_cast<std::uint64_t>(v), c});
      r.tables.push_back(std::move(t));
      r.tables.push_back(std::move(h));
    } else {
      r.tables.push_back(std::move(t));
    }
  } else if (cmd == "density") {
    if (s.grid.empty()) throw CLI::ValidationError("density needs --grid");
    return to_report(density_fit(system, parse_limit_grid(s.grid), opts));
  } else if (cmd == "mertens") {
    ReportTable t{"mertens", {"X", "sum", "deviation", "prime_count"}, {}};
    for (const auto x : limits_of(s)) {
      const auto m = mertens_sum(system, x);
      t.rows.push_back({x, m.sum, m.deviation, prime_count_check(system, x)});
    }
    r.tables.push_back(std::move(t));
  } else if (cmd == "expect") {
    const auto x = limit_of(s);
    std::vector<PrimeEntry> chosen;
    if (!s.primes.empty()) {
      auto universe = list_primes(system, x);
      for (const auto& label : split(s.primes, ',')) {
        auto it = std::find_if(universe.begin(), universe.end(), [&](const PrimeEntry& p) { return p.label == label; });
        if (it == universe.end() && system.kind() == SystemKind::Integers) {
          // A rational prime above X is still a prime; its product simply exceeds X.
          const auto n = parse_count(label);
          const auto wider = list_primes(system, std::max(n, x));
          const auto w = std::find_if(wider.begin(), wider.end(), [&](const PrimeEntry& p) { return p.label == label; });
          if (w != wider.end()) {
            chosen.push_back(*w);
            continue;
          }
        }
        if (it == universe.end())
          throw PrimeNotInSystem("'" + label + "' is not a prime of " + system.spec() + " with norm <= " + std::to_string(x));
        chosen.push_back(*it);
      }
    }
    const auto z = expect_Z(CountingTable(system, x, opts), chosen);
    const auto y = expect_Y(chosen);
    std::string labels;
    for (const auto& p : chosen) labels += (labels.empty() ? "" : ";") + p.label;
    ReportTable t{"expect", {"X", "primes", "expect_Z", "expect_Z_float", "expect_Y", "expect_Y_float"}, {}};
    t.rows.push_back({x, labels, z.value.get_str(), z.float_value, y.value.get_str(), y.float_value});
    r.tables.push_back(std::move(t));
  } else if (cmd == "dominate") {
    const auto k = parse_count(s.kmax);
    if (k > 64) throw ParameterError("--kmax must be <= 64");
    return to_report(domination_report(system, limit_of(s), static_cast<unsigned>(k), opts));
  } else if (cmd == "mgf-gap") {
    return to_report(gap_sweep(system, g, limits_of(s), parse_real(s.cap), parse_real(s.theta), opts));
  } else if (cmd == "tail-mass") {
    const double cap = parse_real(s.cap), theta = parse_real(s.theta);
    ReportTable t{"tail_mass", {"X", "C", "theta", "tail_mass"}, {}};
    for (const auto x : limits_of(s)) t.rows.push_back({x, cap, theta, tail_mass(system, g, x, cap, theta)});
    r.tables.push_back(std::move(t));
  } else if (cmd == "ek") {
    const auto min_norm = parse_count(s.min_norm);
    std::vector<EKReport> rows;
    for (const auto x : limits_of(s)) rows.push_back(ek_report(system, x, min_norm, opts));
    return to_report(rows);
  } else if (cmd == "ldp-scan") {
    if (s.intervals.empty()) throw CLI::ValidationError("ldp-scan needs at least one --interval");
    std::vector<Interval> intervals;
    for (const auto& text : s.intervals) intervals.push_back(parse_interval(text));
    return to_report(ldp_scan(system, g, limits_of(s), intervals, DiscreteMeasure::load(s.rho), opts));
  } else if (cmd == "sweep") {
    if (s.grid.empty()) throw CLI::ValidationError("sweep needs --grid");
    return to_report(condition_sweep(system, g, DiscreteMeasure::load(s.rho), parse_limit_grid(s.grid),
                                     parse_real_grid(s.theta_grid), opts));
  }
  return r;
}

void print_csv(std::ostream& out, const Report& r) {
  const bool labelled = r.tables.size() > 1 || !r.checks.empty();
  bool first = true;
  for (const auto& t : r.tables) {
    if (!first) out << '\n';
    first = false;
    if (labelled) out << "# " << t.name << '\n';
    write_csv(out, t);
  }
  if (!r.checks.empty()) {
    out << "\n# checks\n";
    write_checks_csv(out, r.checks);
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SourceError("cannot write '" + path.string() + "'");
  f << content;
}

// Expands --config FILE into the arguments it records; later arguments win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ValidationError("--config needs a file");
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config.empty()) return args;

  std::ifstream in(config);
  if (!in) throw SourceError("cannot open config '" + config + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw SourceError("malformed config '" + config + "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("command") || !doc["command"].is_string())
    throw SourceError("config '" + config + "' has no command");

  std::vector<std::string> expanded{doc["command"].get<std::string>()};
  if (doc.contains("options")) {
    for (const auto& [key, value] : doc["options"].items()) {
      const auto values = value.is_array() ? value : nlohmann::json::array({value});
      for (const auto& v : values) {
        if (!v.is_string()) throw SourceError("config option '" + key + "' must be a string");
        expanded.push_back("--" + key);
        expanded.push_back(v.get<std::string>());
      }
    }
  }
  // A subcommand on the command line must agree with the recorded one.
  if (!rest.empty() && !rest.front().empty() && rest.front()[0] != '-') {
    if (rest.front() != expanded.front())
      throw CLI::ValidationError("command '" + rest.front() + "' does not match config command '" + expanded.front() + "'");
    rest.erase(rest.begin());
  }
  expanded.insert(expanded.end(), rest.begin(), rest.end());
  return expanded;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Parameter:
    case ErrorKind::Source:
    case ErrorKind::EmptySystem:
    case ErrorKind::PrimeNotInSystem:
      return kExitData;
    case ErrorKind::BudgetExceeded:
    case ErrorKind::Overflow:
      return kExitBudget;
    default:
      return 2;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Large-deviation laboratory for additive functions on normed monoids", "mldp"};
  app.set_version_flag("--version", kVersion);
  app.fallthrough();
  app.require_subcommand(1, 1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Settings s;
  std::map<std::string, CLI::Option*> echoed;
  auto opt = [&](const std::string& name, std::string& target, const std::string& help) {
    echoed[name] = app.add_option("--" + name, target, help);
  };
  opt("system", s.system, "integers | poly:Q | quad:D | beurling:PATH | beurling-list:N,N,...");
  opt("limit", s.limit, "threshold X");
  opt("grid", s.grid, "a,b,c or geom:START:STOP:STEPS");
  opt("g", s.g, "omega | residue:M:R1/R2:VIN:VOUT | table:N=V,...:DEFAULT");
  opt("rho", s.rho, "limit measure: delta1 or a JSON file");
  opt("theta", s.theta, "MGF parameter");
  opt("cap", s.cap, "truncation level C");
  opt("primes", s.primes, "comma-separated prime labels");
  opt("kmax", s.kmax, "largest tuple size");
  opt("min-norm", s.min_norm, "smallest norm entering the KS statistic");
  opt("theta-grid", s.theta_grid, "theta values for the convergence check");
  opt("table-out", s.table_out, "write the enumerated table as a binary cache");
  opt("seed", s.seed, "reserved for sampling modes");
  echoed["interval"] = app.add_option("--interval", s.intervals, "LO:HI (closed) or LO:HI) (half-open); repeatable")
                           ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  echoed["format"] = app.add_option("--format", s.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", s.out, "directory for report files and config-echo.json");
  app.add_option("--threads", s.threads, "worker threads (0 = all cores)");
  app.add_option("--config", "re-run from a config-echo.json");

  for (const auto& c : kCommands) app.add_subcommand(c.name, c.help);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << "run 'mldp --help' for usage\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e);
  }

  s.command = app.get_subcommands().front()->get_name();
  ExecutionOptions opts;
  opts.threads = s.threads;

  try {
    const Report report = run_command(s, opts);

    std::string body;
    if (s.format == "json") {
      body = to_json(report).dump(2) + "\n";
    } else {
      std::ostringstream os;
      print_csv(os, report);
      body = os.str();
    }
    out << body;

    if (!s.out.empty()) {
      const fs::path dir(s.out);
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw SourceError("cannot create '" + dir.string() + "': " + ec.message());
      if (s.format == "json") {
        write_file(dir / (report.command + ".json"), body);
      } else {
        for (const auto& t : report.tables) {
          std::ostringstream os;
          write_csv(os, t);
          write_file(dir / (t.name + ".csv"), os.str());
        }
        if (!report.checks.empty()) {
          std::ostringstream os;
          write_checks_csv(os, report.checks);
          write_file(dir / "checks.csv", os.str());
        }
      }
      nlohmann::json echo;
      echo["version"] = kVersion;
      echo["command"] = s.command;
      nlohmann::json options = nlohmann::json::object();
      for (const auto& [name, option] : echoed) {
        if (kNotEchoed.count(name) || option->count() == 0) continue;
        if (name == "interval") options[name] = s.intervals;
        else options[name] = option->as<std::string>();
      }
      echo["options"] = options;
      write_file(dir / "config-echo.json", echo.dump(2) + "\n");
    }
    return report.exit_code();
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace mldp
