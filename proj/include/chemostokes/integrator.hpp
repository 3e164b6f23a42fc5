#pragma once

#include "chemostokes/diagnostics.hpp"
#include "chemostokes/lyapunov.hpp"
#include "chemostokes/model.hpp"
#include "chemostokes/state.hpp"
#include "chemostokes/stokes.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

namespace chemostokes {

enum class PositivityPolicy {
    Reject,  // abort when a density drops below -1e-13
    Clip,    // set negative densities to 0 and count the cells
};

struct StepControl {
    double dt_max = 1e-2;
    double cfl_safety = 0.4;
    PositivityPolicy positivity = PositivityPolicy::Reject;
    double end_time = 0.0;
    double output_cadence = 0.1;
    // Blow-up surrogate: abort once ||n_i||_inf exceeds this.
    double density_ceiling = 1e6;
    // Wall-clock guard in seconds; 0 disables it.
    double wall_clock_limit = 0.0;
};

/// Individual time-step limits; `dt` is the step actually chosen.
struct DtLimits {
    double diffusive = std::numeric_limits<double>::infinity();
    double drift = std::numeric_limits<double>::infinity();
    double advective = std::numeric_limits<double>::infinity();
    double reaction = std::numeric_limits<double>::infinity();
    // Largest dt for which the explicit density update is a convex
    // combination (diffusion + drift + advection + competition losses).
    double positivity = std::numeric_limits<double>::infinity();
    double dt = 0.0;
};

/// dt = min(dt_max, safety * min(diffusive, drift, advective, reaction), positivity), with
/// diffusive h^2/(2 dim), drift h/max|chi grad c|, advective h/max|u| and
/// reaction 1/(2 max(mu1, mu2) max density). Throws SimulationAborted on a
/// non-finite state or a nonpositive limit.
DtLimits compute_dt_limits(const SimState& s, const StepControl& ctrl, const PhysicalParams& p);
double compute_dt(const SimState& s, const StepControl& ctrl, const PhysicalParams& p);

/// mu1 n1 (1 - n1 - a1 n2) and mu2 n2 (1 - a2 n1 - n2), cellwise.
std::pair<ScalarField, ScalarField> reaction_terms(const ScalarField& n1, const ScalarField& n2,
                                                   const PhysicalParams& p);

/// -(alpha n1 + beta n2) c, cellwise.
ScalarField consumption_term(const ScalarField& n1, const ScalarField& n2, const ScalarField& c,
                             const PhysicalParams& p);

/// What one step did, for the invariant monitor.
struct StepInfo {
    double dt = 0.0;
    double max_divu = 0.0;
    double max_u = 0.0;
    double min_n1 = 0.0;
    double min_n2 = 0.0;
    double min_c = 0.0;
    double max_n1 = 0.0;
    double max_n2 = 0.0;
    double max_c_before = 0.0;
    double max_c = 0.0;
    double mass_n1 = 0.0;
    double mass_n2 = 0.0;
    std::int64_t clipped_cells = 0;
};

/// Scratch buffers and the fluid workspace of one simulation.
class StepWorkspace {
public:
    StepWorkspace(const Grid& grid, const PhysicalParams& p, PoissonSettings poisson = {});

    [[nodiscard]] StokesWorkspace& stokes() { return stokes_; }
    [[nodiscard]] const VectorField& potential_gradient() const { return grad_phi_; }

private:
    friend StepInfo advance(SimState& s, const StepControl& ctrl, const PhysicalParams& p, StepWorkspace& ws,
                            double dt_cap);

    StokesWorkspace stokes_;
    ScalarField phi_;
    VectorField grad_phi_;
    VectorField flux_;
    VectorField force_;
    ScalarField tend1_;
    ScalarField tend2_;
    ScalarField tendc_;
};

/// One composite step, in place:
///  n_i += dt (lap n_i - chemo_div - advect + reaction)
///  c    = (c + dt (lap c - advect c)) / (1 + dt (alpha n1 + beta n2))
///  u    = stokes_step(u, buoyancy(new n1, new n2))
/// dt = min(compute_dt, dt_cap). Throws SimulationAborted on NaN/Inf or a
/// negative density beyond -1e-13 under PositivityPolicy::Reject; the message
/// carries a dump of the offending step.
StepInfo advance(SimState& s, const StepControl& ctrl, const PhysicalParams& p, StepWorkspace& ws,
                 double dt_cap = std::numeric_limits<double>::infinity());

/// Value-returning variant of advance.
SimState step(const SimState& s, const StepControl& ctrl, const PhysicalParams& p, StepWorkspace& ws);

/// Running record of the per-step invariants.
struct InvariantLog {
    std::int64_t steps = 0;
    double min_n1 = std::numeric_limits<double>::infinity();
    double min_n2 = std::numeric_limits<double>::infinity();
    double min_c = std::numeric_limits<double>::infinity();
    // max over steps of (max c after - max c before); <= 1e-12 required.
    double worst_c_increase = -std::numeric_limits<double>::infinity();
    std::int64_t c_max_violations = 0;
    std::optional<std::int64_t> first_c_violation_step;
    // max over steps of max|div u| / (1 + max|u|); <= 1e-9 required.
    double worst_divergence_ratio = 0.0;
    std::int64_t divergence_violations = 0;
    // Mass bound: int n_i <= max(int n_i(0), |Omega|) (1 + 1e-6).
    std::int64_t mass_bound_violations = 0;
    double sup_density = 0.0;  // sup_t (||n1||_inf + ||n2||_inf)
    double sup_n1 = 0.0;
    double sup_n2 = 0.0;
    std::int64_t clipped_cells = 0;

    [[nodiscard]] bool positivity_ok() const { return min_n1 >= 0.0 && min_n2 >= 0.0 && min_c >= 0.0; }
    [[nodiscard]] bool ok() const
    {
        return positivity_ok() && c_max_violations == 0 && divergence_violations == 0 && mass_bound_violations == 0;
    }
};

enum class RunStatus { Completed, Aborted };

struct SimulationSetup {
    PhysicalParams params;
    SimState initial;
    StepControl control;
    PoissonSettings poisson;
    // Weights of the energy column written while running.
    EnergyCoefficients energy_weights;
};

struct RunResult {
    SimState final_state;
    DiagnosticsSeries series;
    InvariantLog invariants;
    RunStatus status = RunStatus::Completed;
    std::string message;
    double wall_seconds = 0.0;
};

/// Diagnostics of one state. Steady-state columns are NaN when `limit` is empty.
DiagnosticsRecord make_record(const SimState& s, const std::optional<SteadyState>& limit, const StepInfo& info,
                              const EnergyCoefficients& weights);

using RecordCallback = std::function<void(const DiagnosticsRecord&)>;

/// Steps from setup.initial to control.end_time, landing exactly on every
/// cadence tick to record diagnostics. Step errors end the run with
/// status Aborted and the partial series; they are not rethrown.
RunResult run(const SimulationSetup& setup, const RecordCallback& on_record = {});

}  // namespace chemostokes
