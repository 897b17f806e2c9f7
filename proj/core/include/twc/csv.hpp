// Minimal CSV ingestion for the engine map and cold-start run files.
// Comment lines starting with '#' are skipped; the first remaining line is
// the header.

#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace twc {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::unordered_map<std::string, std::size_t> column_index;

  bool has_column(const std::string& name) const {
    return column_index.count(name) > 0;
  }
  // Throws std::runtime_error naming the column if absent.
  std::size_t column(const std::string& name) const;
  double at(std::size_t row, const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv_text(const std::string& text, const std::string& origin);

}  // namespace twc
