#include "mldp/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace mldp {

const char* to_string(Flag flag) noexcept {
  switch (flag) {
    case Flag::Pass: return "PASS";
    case Flag::Warn: return "WARN";
    case Flag::Failed: return "FAILED";
  }
  return "?";
}

Flag Report::overall() const noexcept {
  Flag worst = Flag::Pass;
  for (const auto& c : checks) {
    if (c.flag == Flag::Failed) return Flag::Failed;
    if (c.flag == Flag::Warn) worst = Flag::Warn;
  }
  return worst;
}

int Report::exit_code() const noexcept {
  switch (overall()) {
    case Flag::Pass: return 0;
    case Flag::Warn: return 1;
    case Flag::Failed: return 2;
  }
  return 2;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_number(v);
        else if constexpr (std::is_same_v<T, std::string>) return v;
        else return std::to_string(v);
      },
      cell);
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

nlohmann::json cell_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return format_number(v);
          return std::stod(format_number(v));
        } else {
          return v;
        }
      },
      cell);
}

}  // namespace

void write_csv(std::ostream& out, const ReportTable& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << csv_escape(table.columns[i]);
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(format_cell(row[i]));
    out << '\n';
  }
}

void write_checks_csv(std::ostream& out, const std::vector<Check>& checks) {
  out << "check,flag,detail\n";
  for (const auto& c : checks)
    out << csv_escape(c.name) << ',' << to_string(c.flag) << ',' << csv_escape(c.detail) << '\n';
}

nlohmann::json to_json(const Report& report) {
  nlohmann::json doc;
  doc["command"] = report.command;
  doc["status"] = to_string(report.overall());
  nlohmann::json tables = nlohmann::json::object();
  for (const auto& t : report.tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
      nlohmann::json obj = nlohmann::json::object();
      for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) obj[t.columns[i]] = cell_json(row[i]);
      rows.push_back(std::move(obj));
    }
    tables[t.name] = {{"columns", t.columns}, {"rows", rows}};
  }
  doc["tables"] = tables;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"check", c.name}, {"flag", to_string(c.flag)}, {"detail", c.detail}});
  doc["checks"] = checks;
  return doc;
}

}  // namespace mldp
