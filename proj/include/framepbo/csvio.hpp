#pragma once

#include <map>
#include <string>
#include <vector>

namespace framepbo {

// Minimal delimited-text table, header + string cells. Used for the section
// catalogs, the allowable-rotation tables, and all emitted result files.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 if absent
  const std::string& cell(std::size_t row, const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

// Formats a double with enough digits to round-trip; trailing-zero free.
std::string format_double(double v);

std::vector<std::string> split(const std::string& line, char sep);
std::string trim(const std::string& s);

}  // namespace framepbo
