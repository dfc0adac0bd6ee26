#include "thermoform/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

#include "thermoform/error.hpp"

namespace thermoform {

using nlohmann::ordered_json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void Report::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw Error(ErrorCode::InvalidArgument, "report row has " + std::to_string(row.size()) + " cells for " +
                                                std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

ordered_json Manifest::to_json() const {
  ordered_json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["seed"] = seed;
  j["inputs"] = inputs;
  j["timestamp"] = timestamp;
  j["wall_seconds"] = wall_seconds;
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

// Replaces non-finite doubles by their text, since JSON has no literal for them.
ordered_json sanitize(const ordered_json& j) {
  if (j.is_number_float()) {
    const double d = j.get<double>();
    return std::isfinite(d) ? j : ordered_json(format_number(d));
  }
  if (j.is_structured()) {
    ordered_json out = j;
    for (auto it = out.begin(); it != out.end(); ++it) *it = sanitize(*it);
    return out;
  }
  return j;
}

std::string summary_text(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_number(v.get<double>());
  return v.dump();
}

}  // namespace

std::string to_csv(const Report& report, const Manifest& manifest) {
  std::ostringstream out;
  out << "# manifest: " << sanitize(manifest.to_json()).dump() << "\n";
  for (auto it = report.summary.begin(); it != report.summary.end(); ++it)
    out << "# " << it.key() << ": " << summary_text(it.value()) << "\n";
  for (std::size_t i = 0; i < report.columns.size(); ++i) out << (i ? "," : "") << csv_field(report.columns[i]);
  out << "\n";
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(cell_text(row[i]));
    out << "\n";
  }
  return out.str();
}

std::string to_json(const Report& report, const Manifest& manifest) {
  ordered_json j;
  j["manifest"] = manifest.to_json();
  j["summary"] = report.summary;
  j["columns"] = report.columns;
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    ordered_json r = ordered_json::array();
    for (const auto& c : row) std::visit([&](const auto& v) { r.push_back(v); }, c);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return sanitize(j).dump(2) + "\n";
}

}  // namespace thermoform
