#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ranksel {

inline constexpr const char* kVersion = "ranksel-0.1.0";

using Cell = std::variant<double, long long, std::string>;

struct RowTable {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

/// Command-line overrides; they win over config-file values.
struct CliOverrides {
  std::optional<uint64_t> seed;
  std::optional<std::string> out_path;
  std::optional<std::string> format;  // "csv" | "json"
};

/// Runs one experiment kind from a JSON config file, writes the row data to
/// the configured output file, and emits a one-object JSON summary on
/// `summary_out`. Throws std::invalid_argument for config/usage problems and
/// capacity_error when an exact mode exceeds the enumeration caps.
void run_experiment(const std::string& kind, const std::string& config_path,
                    const CliOverrides& overrides, std::ostream& summary_out);

/// Floats rendered with 12 significant digits (CSV schema contract).
std::string format_cell(const Cell& cell);

void write_csv(const RowTable& table, std::ostream& out);

const std::vector<std::string>& experiment_kinds();

}  // namespace ranksel
