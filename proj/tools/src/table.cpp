#include "dnufft_cli/table.hpp"

#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "dnufft/error.hpp"

namespace dnufft::cli {

void Table::add(std::vector<nlohmann::json> row) {
  require(row.size() == columns.size(), ErrorCode::InvalidArgument,
          "row width differs from the header");
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  fail(ErrorCode::InvalidArgument, "no column named " + name);
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  fail(ErrorCode::ParseError, "unknown format '" + name + "'");
}

void write_csv_header(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << '\n';
}

void write_csv_row(std::ostream& out, const std::vector<nlohmann::json>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    const auto& v = row[i];
    if (v.is_string()) {
      out << v.get<std::string>();
    } else if (v.is_number_float()) {
      std::ostringstream s;
      s << std::setprecision(std::numeric_limits<double>::max_digits10) << v.get<double>();
      out << s.str();
    } else {
      out << v.dump();
    }
  }
  out << '\n';
}

void write_table(std::ostream& out, const Table& table, Format format) {
  if (format == Format::Csv) {
    write_csv_header(out, table);
    for (const auto& row : table.rows) write_csv_row(out, row);
    return;
  }
  nlohmann::json doc;
  doc["schema"] = table.schema;
  doc["columns"] = table.columns;
  auto& rows = doc["rows"] = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = row[i];
    rows.push_back(std::move(obj));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace dnufft::cli
