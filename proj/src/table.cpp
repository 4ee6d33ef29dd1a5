#include "slipt/table.hpp"

#include <charconv>
#include <stdexcept>

#include <json.hpp>

namespace slipt {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("Table::add_row: row width does not match the header");
  }
  rows.push_back(std::move(row));
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_cell(const Cell& cell) {
  if (const double* d = std::get_if<double>(&cell)) return format_double(*d);
  if (const std::int64_t* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  return std::get<std::string>(cell);
}

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += csv_escape(table.columns[c]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += csv_escape(format_cell(row[c]));
    }
    out += '\n';
  }
  return out;
}

std::string to_json_records(const Table& table) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json rec = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      const Cell& cell = row[c];
      if (const double* d = std::get_if<double>(&cell)) {
        rec[table.columns[c]] = *d;
      } else if (const std::int64_t* i = std::get_if<std::int64_t>(&cell)) {
        rec[table.columns[c]] = *i;
      } else {
        rec[table.columns[c]] = std::get<std::string>(cell);
      }
    }
    records.push_back(std::move(rec));
  }
  return records.dump(2) + "\n";
}

}  // namespace slipt
