#ifndef MLDP_REPORT_HPP
#define MLDP_REPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace mldp {

using Cell = std::variant<std::int64_t, std::uint64_t, double, std::string>;

struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum class Flag { Pass, Warn, Failed };

const char* to_string(Flag flag) noexcept;

struct Check {
  std::string name;
  Flag flag = Flag::Pass;
  std::string detail;
};

struct Report {
  std::string command;
  std::vector<ReportTable> tables;
  std::vector<Check> checks;

  Flag overall() const noexcept;
  /// 0 = all PASS, 1 = any WARN, 2 = any FAILED.
  int exit_code() const noexcept;
};

/// Twelve significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double value);
std::string format_cell(const Cell& cell);

void write_csv(std::ostream& out, const ReportTable& table);
void write_checks_csv(std::ostream& out, const std::vector<Check>& checks);
nlohmann::json to_json(const Report& report);

}  // namespace mldp

#endif  // MLDP_REPORT_HPP
