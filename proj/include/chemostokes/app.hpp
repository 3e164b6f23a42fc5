#pragma once

#include "chemostokes/config.hpp"
#include "chemostokes/integrator.hpp"
#include "chemostokes/lyapunov.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace chemostokes {

/// Everything the long-time checks can say about one stored series.
struct LyapunovAssessment {
    RegimeReport regime;
    std::optional<SteadyState> limit;
    EnergyCase energy_case = EnergyCase::Coexistence;

    // Fit with the configured weights, and the best weights on the search grid.
    std::optional<DecayReport> configured;
    std::optional<CoefficientSearch> search;
    MonotoneCheck c_monotone;
    std::optional<VelocityDecayReport> u_decay;
    // Floor of min n2 against half its steady value.
    std::optional<FloorReport> n2_floor;
    // int c^2 at the cutoff and at the end; the tail must not grow.
    double c_l2sq_at_cutoff = 0.0;
    double c_l2sq_final = 0.0;
    bool c_tail_decays = true;

    // Set when the series cannot support the fit (no steady state, too short).
    std::string unavailable;

    [[nodiscard]] bool ok() const;
};

LyapunovAssessment evaluate_lyapunov(const DiagnosticsSeries& series, const PhysicalParams& p,
                                     const EnergyCoefficients& weights, double cutoff);

/// Human-readable report, one finding per line.
std::vector<std::string> describe(const LyapunovAssessment& a);

struct RunArtifacts {
    RunResult result;
    LyapunovAssessment lyapunov;
    std::filesystem::path dir;
};

/// Runs `cfg` and writes into `dir`: config.resolved, timeseries.csv,
/// energy.csv, summary.json and, if enabled, snapshots/initial and
/// snapshots/final. A progress line per record goes to `progress` when set.
RunArtifacts run_to_directory(const RunConfig& cfg, const std::filesystem::path& dir,
                              std::ostream* progress = nullptr);

void write_summary(const std::filesystem::path& path, const RunConfig& cfg, const RunResult& result,
                   const LyapunovAssessment& lyapunov);

struct CheckReport {
    bool aborted = false;
    std::string status_message;
    LyapunovAssessment lyapunov;
    std::vector<std::string> lines;
};

/// Re-evaluates the Lyapunov reports from a run directory's stored series.
CheckReport check_run_dir(const std::filesystem::path& dir);

}  // namespace chemostokes
