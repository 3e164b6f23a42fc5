#pragma once

#include "chemostokes/diagnostics.hpp"
#include "chemostokes/fields.hpp"
#include "chemostokes/state.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chemostokes {

inline constexpr std::string_view kTimeseriesHeader =
    "t,mass_n1,mass_n2,linf_n1_dev,linf_n2_dev,linf_c,l2_c,linf_u,l2_u,min_n2,energy,dissipation,max_divu,dt";

/// timeseries.csv: fixed header, one row per record, 17 significant digits.
/// An empty series is refused.
void write_timeseries(const std::filesystem::path& path, const DiagnosticsSeries& series);

/// Reads the 14 columns back; energy parts stay zero.
DiagnosticsSeries read_timeseries(const std::filesystem::path& path);

/// energy.csv: t,energy_n1,energy_n2,energy_c (the integrals the energy
/// column is assembled from).
void write_energy_parts(const std::filesystem::path& path, const DiagnosticsSeries& series);

/// Fills energy_n1/n2/c of `series` from energy.csv; times must match.
void read_energy_parts(const std::filesystem::path& path, DiagnosticsSeries& series);

/// First line of a snapshot file:
///   CHEMOSTOKES v1 <name> dim=<d> n=<n0,n1,n2> h=<h0,h1,h2> t=<time> [stagger=<axis>]
/// followed by little-endian float64 values, x-fastest.
struct SnapshotHeader {
    std::string name;
    int dim = 0;
    Index3 n{1, 1, 1};
    Vec3 h{1.0, 1.0, 1.0};
    double t = 0.0;
    // Face fields record the axis their values are staggered along.
    std::optional<int> stagger;

    [[nodiscard]] std::size_t value_count() const;
};

std::string format_snapshot_header(const SnapshotHeader& header);
SnapshotHeader parse_snapshot_header(std::string_view line);

struct Snapshot {
    SnapshotHeader header;
    std::vector<double> values;
};

/// Refuses non-finite values with NonFiniteError.
void write_snapshot(const std::filesystem::path& path, const SnapshotHeader& header, std::span<const double> values);
void write_snapshot(const std::filesystem::path& path, std::string_view name, const ScalarField& f, double t);
void write_snapshot(const std::filesystem::path& path, std::string_view name, const VectorField& v, int axis, double t);

Snapshot read_snapshot(const std::filesystem::path& path);
ScalarField read_scalar_snapshot(const std::filesystem::path& path);

/// n1, n2, c, p and u0..u{dim-1} in one directory, named <field>.bin.
void write_state_snapshots(const std::filesystem::path& dir, const SimState& s);
SimState read_state_snapshots(const std::filesystem::path& dir);

}  // namespace chemostokes
