// Subcommand implementations. Each takes the effective configuration,
// writes its CSV artifacts under the output directory, prints a short
// summary to stdout, and returns a process exit code.
#pragma once

#include "config.hpp"

namespace sam::cli {

int cmd_simulate(Config& cfg);
int cmd_simulate_bridge(Config& cfg);
int cmd_estimate(Config& cfg);
int cmd_surface(Config& cfg);
int cmd_profile(Config& cfg);
int cmd_table2(Config& cfg);
int cmd_nscaling(Config& cfg);
int cmd_validate(Config& cfg);

}  // namespace sam::cli
