#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace slipt {

using Cell = std::variant<double, std::int64_t, std::string>;

/// A rectangular result table; the first-class output of every subcommand.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

/// Shortest round-trip decimal formatting ('.' separator, locale-free).
std::string format_double(double value);

std::string format_cell(const Cell& cell);

/// RFC 4180 CSV with a header row.
std::string to_csv(const Table& table);

/// JSON records: an array of column->value objects.
std::string to_json_records(const Table& table);

}  // namespace slipt
