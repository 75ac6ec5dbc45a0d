#pragma once

#include <string>
#include <vector>

#include "mgsim/scenario.hpp"

namespace mgsim {

/// Settings for the quantized-control demo driven by `mgsim stability`.
struct StabilityConfig {
    int grid_points = 9;
    long steps = 100000;
    double x0_1 = 2.0;
    double x0_2 = -1.0;
    double k_1 = 6.0;
    double k_2 = 2.3;
    bool exact_law = false;
};

/// A parsed config file: the scenario, the stability-demo settings, and one
/// notice per key that fell back to its default.
struct ParsedConfig {
    Scenario scenario;
    StabilityConfig stability;
    std::vector<std::string> notices;
};

/// Parse the INI-style config format (sections [grid], [ibr.N], [line.N],
/// [load.N], [droop], [pi], [sim], [stability]; '#' or ';' comments).
/// Unknown sections or keys are rejected with the offending line number.
/// Missing keys default to the shipped reference scenario, each recorded as
/// a notice. An empty string parses to the full defaults.
ParsedConfig parse_config_text(const std::string& text);

/// Read and parse a config file; an empty path yields the defaults.
ParsedConfig parse_config(const std::string& path);

}  // namespace mgsim
