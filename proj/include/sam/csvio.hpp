// CSV output with a reproducibility header and dataset round-tripping.
// Data rows are formatted with %.17g so reruns are byte-identical and
// doubles survive a round trip exactly.
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "sam/datasim.hpp"

namespace sam {

struct OutHeader {
  std::string tool;  // version string
  uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;  // echoed keys
  double wall_seconds = 0.0;
};

std::string fmt_g17(double v);

// '#'-prefixed comment block: tool version, config echo, seed, wall clock.
void write_header(std::ostream& os, const OutHeader& h);

void write_series_csv(const std::string& path, const OutHeader& h,
                      const ObservationSeries& s);
ObservationSeries read_series_csv(const std::string& path);

// Generic comma-joined table under the same header.
void write_table_csv(const std::string& path, const OutHeader& h,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

}  // namespace sam
