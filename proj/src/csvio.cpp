#include "sam/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sam {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_header(std::ostream& os, const OutHeader& h) {
  os << "# tool: " << h.tool << "\n";
  for (const auto& [k, v] : h.config) os << "# config " << k << " = " << v << "\n";
  os << "# seed: " << h.seed << "\n";
  os << "# wall_seconds: " << fmt_g17(h.wall_seconds) << "\n";
}

void write_series_csv(const std::string& path, const OutHeader& h,
                      const ObservationSeries& s) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_series_csv: cannot open " + path);
  write_header(os, h);
  os << "time,value\n";
  for (size_t i = 0; i < s.times.size(); ++i)
    os << fmt_g17(s.times[i]) << "," << fmt_g17(s.values[i]) << "\n";
  if (!os) throw std::runtime_error("write_series_csv: write failed: " + path);
}

ObservationSeries read_series_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_series_csv: cannot open " + path);
  ObservationSeries s;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("time,", 0) == 0) continue;
    std::istringstream ls(line);
    std::string a, b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b))
      throw std::runtime_error("read_series_csv: malformed row: " + line);
    s.times.push_back(std::stod(a));
    s.values.push_back(std::stod(b));
  }
  if (s.times.size() < 2)
    throw std::runtime_error("read_series_csv: need at least two rows");
  return s;
}

void write_table_csv(const std::string& path, const OutHeader& h,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_table_csv: cannot open " + path);
  write_header(os, h);
  for (size_t c = 0; c < columns.size(); ++c)
    os << columns[c] << (c + 1 < columns.size() ? "," : "\n");
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c)
      os << fmt_g17(row[c]) << (c + 1 < row.size() ? "," : "\n");
  }
  if (!os) throw std::runtime_error("write_table_csv: write failed: " + path);
}

}  // namespace sam
