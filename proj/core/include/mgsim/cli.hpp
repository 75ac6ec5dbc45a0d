#pragma once

#include <optional>
#include <ostream>
#include <string>

namespace mgsim {

/// Stable exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 1,
    kExitDivergence = 2,
    kExitOracleFailure = 3,
    kExitCertificationFailure = 4,
};

struct RunOptions {
    std::string config_path;          // empty: built-in defaults
    std::string out_path;             // CSV destination
    std::optional<double> duration;   // s
    std::optional<int> substeps;
    std::optional<double> log_rate_hz;
    bool seed_check = false;          // run twice and require byte-identical CSV
    bool gnuplot_script = false;      // also emit <out>.gp
};

/// Run the closed loop, write the CSV, and print a key = value summary block
/// for the steady windows that fit the run duration.
int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err);

struct SteadyOptions {
    std::string config_path;
    std::optional<double> at_time;  // loads active at this time (default 0)
    bool no_loads = false;
};

/// Print the algebraic operating point as key = value lines.
int cmd_steady(const SteadyOptions& opt, std::ostream& out, std::ostream& err);

struct StabilityOptions {
    std::string config_path;
    bool exact_law = false;  // force the exact continuous law (epsilon = 0)
};

/// Print the Lyapunov certificate and the trajectory verification report for
/// the configured quantized system (defaults to the built-in 2-state demo).
int cmd_stability(const StabilityOptions& opt, std::ostream& out, std::ostream& err);

struct SweepOptions {
    std::string config_path;
    std::string parameter;  // mp_ratio | nq_ratio | line_scale
    std::string points;     // "1,1,1;1,2,2" per-IBR factors, or "1;2;4" scalars
    std::string out_path;
    std::optional<double> duration;
};

/// One summary row per sweep point; per-point divergence is recorded in the
/// row and the sweep continues. Points run in parallel.
int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace mgsim
