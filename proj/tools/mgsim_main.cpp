#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "mgsim/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mgsim - islanded AC microgrid simulator (droop + FCS-MPC) and "
                 "quantized-control stability checker"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may appear after the subcommand

    std::string config_path;
    app.add_option("--config", config_path, "config file (omit for built-in defaults)")
        ->expected(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "simulate a scenario and write a CSV log");
    mgsim::RunOptions run_opt;
    run_cmd->add_option("--out", run_opt.out_path, "CSV output path");
    std::optional<double> duration;
    std::optional<int> substeps;
    std::optional<double> log_rate;
    run_cmd->add_option("--duration", duration, "override duration [s]");
    run_cmd->add_option("--substeps", substeps, "override plant substeps per control period");
    run_cmd->add_option("--log-rate", log_rate, "override log sample rate [Hz]");
    run_cmd->add_flag("--seed-check", run_opt.seed_check,
                      "run twice and require byte-identical CSV output");
    run_cmd->add_flag("--gnuplot-script", run_opt.gnuplot_script,
                      "also write a companion gnuplot script next to the CSV");

    // steady
    auto* steady_cmd = app.add_subcommand("steady", "solve the algebraic operating point");
    mgsim::SteadyOptions steady_opt;
    std::optional<double> at_time;
    steady_cmd->add_option("--at", at_time, "time selecting the active loads [s] (default 0)");
    steady_cmd->add_flag("--no-loads", steady_opt.no_loads, "solve with every load disconnected");

    // stability
    auto* stab_cmd =
        app.add_subcommand("stability", "certify the configured quantized demo system");
    mgsim::StabilityOptions stab_opt;
    stab_cmd->add_flag("--exact-law", stab_opt.exact_law,
                       "use the exact continuous law (epsilon = 0)");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep and tabulate sharing");
    mgsim::SweepOptions sweep_opt;
    sweep_cmd->add_option("--param", sweep_opt.parameter,
                          "swept parameter: mp_ratio, nq_ratio, or line_scale")
        ->required();
    sweep_cmd->add_option("--points", sweep_opt.points,
                          "sweep points, e.g. \"1,1,1;1,2,2\" or \"1;2;4\"")
        ->required();
    sweep_cmd->add_option("--out", sweep_opt.out_path, "CSV output path (default: stdout)");
    std::optional<double> sweep_duration;
    sweep_cmd->add_option("--duration", sweep_duration, "per-point run duration [s]");

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) {
        run_opt.config_path = config_path;
        run_opt.duration = duration;
        run_opt.substeps = substeps;
        run_opt.log_rate_hz = log_rate;
        return mgsim::cmd_run(run_opt, std::cout, std::cerr);
    }
    if (steady_cmd->parsed()) {
        steady_opt.config_path = config_path;
        steady_opt.at_time = at_time;
        return mgsim::cmd_steady(steady_opt, std::cout, std::cerr);
    }
    if (stab_cmd->parsed()) {
        stab_opt.config_path = config_path;
        return mgsim::cmd_stability(stab_opt, std::cout, std::cerr);
    }
    if (sweep_cmd->parsed()) {
        sweep_opt.config_path = config_path;
        sweep_opt.duration = sweep_duration;
        return mgsim::cmd_sweep(sweep_opt, std::cout, std::cerr);
    }
    return mgsim::kExitConfigError;
}
