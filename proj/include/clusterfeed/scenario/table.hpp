#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace clusterfeed::scenario {

/// Empty cells stand for undefined values (for example an undefined correlation).
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Appends an empty row and returns it; cells are set with set().
  std::vector<Cell>& add_row();
  void set(std::vector<Cell>& row, const std::string& column, Cell value);
  std::size_t column_index(const std::string& column);
};

/// Doubles are written with 17 significant digits so that parsing restores
/// them bit for bit.
std::string format_double(double x);

void write_csv(std::ostream& out, const Table& table);
/// Reads a table written by write_csv. Integers come back as int64, other
/// numbers as double.
Table read_csv(std::istream& in);

nlohmann::json table_to_json(const Table& table);

}  // namespace clusterfeed::scenario
