#pragma once

#include "chemostokes/diagnostics.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace chemostokes {

/// Values at or below this are drawn at the floor on logarithmic axes.
inline constexpr double kLogPlotFloor = 1e-16;

struct PlotSeries {
    std::string label;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string y_label;
    bool log_y = false;
    std::vector<double> x;
    std::vector<PlotSeries> series;
};

/// Static SVG line chart. Throws ValidationError for fewer than two points
/// or mismatched lengths. Non-finite samples break the line.
std::string render_svg(const PlotSpec& spec);

/// densities.svg (deviations, log scale), signal_velocity.svg (||c||_inf,
/// ||u||_2) and energy.svg (E and F, log scale) in `dir`. Returns the paths.
std::array<std::filesystem::path, 3> emit_plots(const DiagnosticsSeries& series, const std::filesystem::path& dir);

}  // namespace chemostokes
