#include "clusterfeed/scenario/table.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>

#include "clusterfeed/errors.hpp"

namespace clusterfeed::scenario {

std::vector<Cell>& Table::add_row() {
  rows.emplace_back(columns.size());
  return rows.back();
}

std::size_t Table::column_index(const std::string& column) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == column) return i;
  }
  columns.push_back(column);
  for (auto& r : rows) r.resize(columns.size());
  return columns.size() - 1;
}

void Table::set(std::vector<Cell>& row, const std::string& column, Cell value) {
  const std::size_t i = column_index(column);
  if (row.size() < columns.size()) row.resize(columns.size());
  row[i] = std::move(value);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  struct {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double x) const { return format_double(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(const std::string& s) const { return quote(s); }
  } visitor;
  return std::visit(visitor, c);
}

std::vector<std::string> split_line(std::istream& in, bool& ok) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  ok = false;
  int ch;
  bool any = false;
  while ((ch = in.get()) != EOF) {
    any = true;
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (!any) return fields;
  fields.push_back(field);
  ok = true;
  return fields;
}

Cell parse_cell(const std::string& s) {
  if (s.empty()) return std::monostate{};
  std::int64_t i = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), i);
  if (ec == std::errc() && p == s.data() + s.size()) return i;
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (end == s.c_str() + s.size()) return d;
  return s;
}

}  // namespace

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << quote(table.columns[i]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      out << (i ? "," : "") << (i < row.size() ? cell_text(row[i]) : "");
    }
    out << '\n';
  }
}

Table read_csv(std::istream& in) {
  Table t;
  bool ok = false;
  t.columns = split_line(in, ok);
  if (!ok) throw ValidationError("csv: missing header");
  while (true) {
    auto fields = split_line(in, ok);
    if (!ok) break;
    if (fields.size() != t.columns.size()) throw ValidationError("csv: ragged row");
    auto& row = t.add_row();
    for (std::size_t i = 0; i < fields.size(); ++i) row[i] = parse_cell(fields[i]);
  }
  return t;
}

nlohmann::json table_to_json(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      const Cell& c = i < row.size() ? row[i] : Cell{};
      if (std::holds_alternative<std::monostate>(c)) {
        r[table.columns[i]] = nullptr;
      } else if (const double* d = std::get_if<double>(&c)) {
        // json has no nan/inf literal
        if (std::isfinite(*d)) r[table.columns[i]] = *d;
        else r[table.columns[i]] = format_double(*d);
      } else if (const auto* n = std::get_if<std::int64_t>(&c)) {
        r[table.columns[i]] = *n;
      } else {
        r[table.columns[i]] = std::get<std::string>(c);
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace clusterfeed::scenario
