#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace dnufft::cli {

/// Rows of scalar cells under a fixed header, written as CSV or JSON.
struct Table {
  std::string schema;  // e.g. "accuracy/1"
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  void add(std::vector<nlohmann::json> row);
  /// Index of a column; throws if absent.
  std::size_t column(const std::string& name) const;
};

enum class Format { Csv, Json };

Format parse_format(const std::string& name);
void write_table(std::ostream& out, const Table& table, Format format);
void write_csv_header(std::ostream& out, const Table& table);
void write_csv_row(std::ostream& out, const std::vector<nlohmann::json>& row);

}  // namespace dnufft::cli
