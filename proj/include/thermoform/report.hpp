#ifndef THERMOFORM_REPORT_HPP
#define THERMOFORM_REPORT_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace thermoform {

inline constexpr const char* kVersion = "0.1.0";

/// Doubles print with 17 significant digits so they read back exactly.
std::string format_number(double x);

using Cell = std::variant<double, long long, std::string>;

/// A table of rows plus scalar results, written as CSV or JSON together with
/// the run manifest.
struct Report {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();

  void add_row(std::vector<Cell> row);
};

struct Manifest {
  std::string command;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::string timestamp;  // UTC, ISO 8601

  nlohmann::ordered_json to_json() const;
};

/// UTC time now, e.g. 2024-01-31T12:00:00Z.
std::string utc_timestamp();

/// CSV: "# manifest: {...}" and "# <key>: <value>" summary lines, then the
/// header and rows.
std::string to_csv(const Report& report, const Manifest& manifest);

/// JSON: {"manifest": ..., "summary": ..., "columns": [...], "rows": [[...]]}.
/// Non-finite numbers become strings ("inf", "-inf", "nan").
std::string to_json(const Report& report, const Manifest& manifest);

}  // namespace thermoform

#endif  // THERMOFORM_REPORT_HPP
