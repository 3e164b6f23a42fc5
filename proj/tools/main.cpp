#include "chemostokes/app.hpp"
#include "chemostokes/config.hpp"
#include "chemostokes/errors.hpp"
#include "chemostokes/io.hpp"
#include "chemostokes/plot.hpp"
#include "chemostokes/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace cs = chemostokes;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kAborted = 2 };

int cmd_run(const std::filesystem::path& config, const std::string& out_override, bool quiet)
{
    cs::RunConfig cfg = cs::parse_config(config);
    if (!out_override.empty()) {
        cfg.output_dir = out_override;
    }
    std::cout << "running to t = " << cfg.control.end_time << " on a " << cfg.grid.dim << "D grid, output in "
              << cfg.output_dir.string() << '\n';
    const auto art = cs::run_to_directory(cfg, cfg.output_dir, quiet ? nullptr : &std::cout);
    std::cout << art.result.invariants.steps << " steps in " << art.result.wall_seconds << " s\n";
    for (const auto& line : cs::describe(art.lyapunov)) {
        std::cout << "  " << line << '\n';
    }
    if (art.result.status == cs::RunStatus::Aborted) {
        std::cerr << "simulation aborted: " << art.result.message << '\n';
        return kAborted;
    }
    return kOk;
}

int cmd_sweep(const std::filesystem::path& config, const std::vector<double>& chi, const std::string& out_override,
              unsigned jobs)
{
    cs::RunConfig cfg = cs::parse_config(config);
    const std::filesystem::path out = out_override.empty() ? cfg.output_dir : std::filesystem::path(out_override);
    const auto summary = cs::run_sweep(cfg, chi, out, jobs);
    std::printf("%-10s %-12s %-14s %-10s %s\n", "chi", "chi/mu", "sup density", "status", "final E");
    for (const auto& r : summary.rows) {
        std::printf("%-10.4g %-12.4g %-14.6g %-10s %.6g\n", r.chi, r.chi_over_mu, r.sup_density,
                    r.completed ? "completed" : "aborted", r.final_energy);
        if (!r.completed) {
            std::printf("    %s\n", r.message.c_str());
        }
    }
    std::cout << "summary written to " << (out / "sweep_summary.csv").string() << '\n';
    return kOk;
}

int cmd_check(const std::filesystem::path& dir)
{
    const auto rep = cs::check_run_dir(dir);
    for (const auto& line : rep.lines) {
        std::cout << line << '\n';
    }
    if (rep.aborted) {
        return kAborted;
    }
    return rep.lyapunov.ok() ? kOk : kInvalid;
}

int cmd_plot(const std::filesystem::path& dir)
{
    cs::DiagnosticsSeries series = cs::read_timeseries(dir / "timeseries.csv");
    const auto paths = cs::emit_plots(series, dir / "plots");
    for (const auto& p : paths) {
        std::cout << p.string() << '\n';
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-species chemotaxis-Stokes simulator with competitive kinetics"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "Run one simulation from a config file");
    run->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", out, "Output directory (overrides output.dir)");
    run->add_flag("-q,--quiet", quiet, "No per-record progress");

    std::vector<double> chi;
    unsigned jobs = 0;
    auto* sweep = app.add_subcommand("sweep", "Run one simulation per chemotactic sensitivity");
    sweep->add_option("config", config, "Base config file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--chi", chi, "Sensitivities, comma separated")->required()->delimiter(',');
    sweep->add_option("-o,--output", out, "Sweep directory (overrides output.dir)");
    sweep->add_option("-j,--jobs", jobs, "Concurrent runs (0 = all cores)");

    std::string dir;
    auto* check = app.add_subcommand("check", "Re-evaluate the Lyapunov reports of a finished run");
    check->add_option("run-dir", dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    auto* plot = app.add_subcommand("plot", "Write SVG plots of a run's time series");
    plot->add_option("run-dir", dir, "Run directory")->required()->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (*run) {
            return cmd_run(config, out, quiet);
        }
        if (*sweep) {
            return cmd_sweep(config, chi, out, jobs);
        }
        if (*check) {
            return cmd_check(dir);
        }
        return cmd_plot(dir);
    }
    catch (const cs::SimulationAborted& e) {
        std::cerr << "aborted: " << e.what() << '\n';
        return kAborted;
    }
    catch (const cs::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
}
