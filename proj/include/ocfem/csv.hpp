#pragma once

#include <string>
#include <vector>

namespace ocfem {

// Full round-trip precision decimal (17 significant digits).
std::string format_full(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string render_csv(const CsvTable& table);

// Creates parent directories as needed.
void write_csv(const std::string& path, const CsvTable& table);

}  // namespace ocfem
