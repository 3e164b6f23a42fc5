#pragma once

#include "chemostokes/integrator.hpp"
#include "chemostokes/lyapunov.hpp"
#include "chemostokes/model.hpp"
#include "chemostokes/poisson.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace chemostokes {

enum class InitialPreset {
    CosinePerturbation,  // mean + amplitude * prod_a cos(mode pi x_a / L_a)
    TwoBump,             // background + Gaussian bump per species, centres drawn from the seed
    FromFile,            // snapshot files for n1, n2, c
};

struct InitialCondition {
    InitialPreset preset = InitialPreset::CosinePerturbation;
    double n1_mean = 1.0;
    double n2_mean = 1.0;
    double amplitude = 0.1;
    int n1_mode = 1;
    int n2_mode = 2;
    double c_mean = 1.0;
    double c_amplitude = 0.0;

    double background = 0.1;
    double bump_height = 1.0;
    double bump_width = 0.1;

    std::filesystem::path n1_file;
    std::filesystem::path n2_file;
    std::filesystem::path c_file;
};

struct GridSpec {
    int dim = 2;
    Index3 cells{1, 1, 1};
    Vec3 spacing{1.0, 1.0, 1.0};

    [[nodiscard]] Grid make() const { return Grid(dim, cells, spacing); }
};

struct RunConfig {
    PhysicalParams params;
    GridSpec grid;
    InitialCondition initial;
    StepControl control;
    PoissonSettings poisson;
    EnergyCoefficients energy_weights;
    double transient_cutoff = 1.0;
    std::filesystem::path output_dir = "run";
    bool write_snapshots = true;
    std::uint64_t seed = 0;
};

/// Parses the flat `section.key = value` format (one pair per line, `#`
/// comments). Unknown keys, duplicates, missing required keys (grid.dim,
/// grid.n, time.end), type mismatches and model-hypothesis violations all
/// throw ValidationError naming the key. Relative file paths resolve
/// against `base_dir`.
RunConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig parse_config(const std::filesystem::path& path);

/// Resolved configuration in the same format, every key explicit.
std::string to_config_text(const RunConfig& cfg);

/// Samples the initial condition. Densities must be strictly positive.
SimState build_initial_state(const RunConfig& cfg);

SimulationSetup make_setup(const RunConfig& cfg);

}  // namespace chemostokes
