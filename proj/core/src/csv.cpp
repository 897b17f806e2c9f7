#include "twc/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twc {

std::size_t CsvTable::column(const std::string& name) const {
  auto it = column_index.find(name);
  if (it == column_index.end())
    throw std::runtime_error("csv: missing column '" + name + "'");
  return it->second;
}

double CsvTable::at(std::size_t row, const std::string& name) const {
  return rows.at(row).at(column(name));
}

CsvTable parse_csv_text(const std::string& text, const std::string& origin) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string field;
    if (!have_header) {
      while (std::getline(fields, field, ',')) {
        // Trim surrounding whitespace.
        const auto b = field.find_first_not_of(" \t");
        const auto e = field.find_last_not_of(" \t");
        field = b == std::string::npos ? "" : field.substr(b, e - b + 1);
        table.column_index[field] = table.header.size();
        table.header.push_back(field);
      }
      have_header = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(table.header.size());
    std::size_t col = 0;
    while (std::getline(fields, field, ',')) {
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        std::ostringstream msg;
        msg << origin << ":" << line_no << ": column "
            << (col < table.header.size() ? table.header[col]
                                          : std::to_string(col + 1))
            << ": cannot parse '" << field << "' as a number";
        throw std::runtime_error(msg.str());
      }
      ++col;
    }
    if (row.size() != table.header.size()) {
      std::ostringstream msg;
      msg << origin << ":" << line_no << ": expected " << table.header.size()
          << " fields, got " << row.size();
      throw std::runtime_error(msg.str());
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header)
    throw std::runtime_error(origin + ": empty file (no header)");
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv_text(ss.str(), path);
}

}  // namespace twc
