#pragma once

#include <vector>

namespace chemostokes {

/// Per-cadence snapshot of the norms monitored along a run.
///
/// Deviations, energy and dissipation are NaN when the parameters admit no
/// steady state. energy_n1 / energy_n2 / energy_c are the three integrals the
/// active energy is assembled from (species-1 entropy, species-2 entropy,
/// integral of c^2), so the energy can be re-evaluated for any weights.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass_n1 = 0.0;
    double mass_n2 = 0.0;
    double linf_n1_dev = 0.0;
    double linf_n2_dev = 0.0;
    double linf_c = 0.0;
    double l2_c = 0.0;
    double linf_u = 0.0;
    double l2_u = 0.0;
    double min_n2 = 0.0;
    double energy = 0.0;
    double dissipation = 0.0;
    double max_divu = 0.0;
    double dt = 0.0;

    double energy_n1 = 0.0;
    double energy_n2 = 0.0;
    double energy_c = 0.0;
};

using DiagnosticsSeries = std::vector<DiagnosticsRecord>;

}  // namespace chemostokes
