#include "ocfem/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ocfem/errors.hpp"

namespace ocfem {

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_csv(const CsvTable& table) {
  std::string out;
  auto append_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  };
  append_row(table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw ValidationError("csv row width does not match the header");
    append_row(row);
  }
  return out;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file: " + path);
  out << render_csv(table);
  if (!out) throw ValidationError("failed writing output file: " + path);
}

}  // namespace ocfem
