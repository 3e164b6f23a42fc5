#pragma once

#include "chemostokes/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace chemostokes {

struct SweepRow {
    double chi = 0.0;
    double chi_over_mu = 0.0;
    double sup_density = 0.0;  // sup over t of ||n1||_inf + ||n2||_inf
    bool completed = false;
    double final_energy = 0.0;
    InvariantLog invariants;
    std::string message;
    std::filesystem::path dir;
};

struct SweepSummary {
    std::vector<SweepRow> rows;  // in the order of the chi values given
};

/// One run per chi with chi1 = chi2 = chi, each in out_dir/chi_<value>.
/// Runs go through a pool of `workers` threads (0 picks the hardware
/// concurrency). A failing run is recorded and the sweep continues.
/// Writes out_dir/sweep_summary.csv. An empty or nonpositive list throws.
SweepSummary run_sweep(const RunConfig& base, const std::vector<double>& chi_values,
                       const std::filesystem::path& out_dir, unsigned workers = 0);

void write_sweep_summary(const std::filesystem::path& path, const SweepSummary& summary);

}  // namespace chemostokes
