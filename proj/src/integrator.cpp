#include "chemostokes/integrator.hpp"

#include "chemostokes/detail/reduce.hpp"
#include "chemostokes/detail/stencil.hpp"
#include "chemostokes/errors.hpp"
#include "chemostokes/operators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace chemostokes {

using detail::for_each_interior_face;

SimState make_state(ScalarField n1, ScalarField n2, ScalarField c)
{
    if (!(n1.grid() == n2.grid()) || !(n1.grid() == c.grid())) {
        throw ValidationError("n1, n2 and c must share one grid");
    }
    SimState s;
    s.u = VectorField(n1.grid());
    s.pressure = ScalarField(n1.grid());
    s.n1 = std::move(n1);
    s.n2 = std::move(n2);
    s.c = std::move(c);
    return s;
}

namespace {

constexpr double kNegativityTolerance = 1e-13;

struct Extremes {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    bool finite = true;
};

Extremes finish(double min, double max, double sum)
{
    // NaN never wins a min/max comparison but always poisons the sum.
    return {min, max, sum, std::isfinite(sum) && std::isfinite(min) && std::isfinite(max)};
}

Extremes extremes(const ScalarField& f)
{
    const auto r = detail::min_max_sum(f.values());
    return finish(r.min, r.max, r.sum);
}

double max_abs_component(const VectorField& v, int axis)
{
    return detail::max_abs(v.component(axis));
}

std::string dump(const SimState& s, double dt)
{
    std::ostringstream os;
    os.precision(17);
    os << "step " << s.step << " at t = " << s.t << " with dt = " << dt;
    const auto describe = [&](const char* name, const ScalarField& f) {
        const auto e = extremes(f);
        os << "; " << name << " in [" << e.min << ", " << e.max << "]";
    };
    describe("n1", s.n1);
    describe("n2", s.n2);
    describe("c", s.c);
    double umax = 0.0;
    for (int a = 0; a < s.grid().dim(); ++a) {
        umax = std::max(umax, max_abs_component(s.u, a));
    }
    os << "; max|u| = " << umax;
    return os.str();
}

}  // namespace

namespace {

DtLimits dt_limits_and_signal_max(const SimState& s, const StepControl& ctrl, const PhysicalParams& p,
                                  double& c_max)
{
    const Grid& g = s.grid();
    const int dim = g.dim();
    const double chi = p.chi_max();
    DtLimits lim;

    const auto e1 = extremes(s.n1);
    const auto e2 = extremes(s.n2);
    const auto ec = extremes(s.c);
    if (!e1.finite || !e2.finite || !ec.finite) {
        throw SimulationAborted("compute_dt: state is not finite (" + dump(s, 0.0) + ")");
    }
    const double max_density = std::max({e1.max, e2.max, 0.0});

    const double h_min = g.min_spacing();
    lim.diffusive = h_min * h_min / (2.0 * dim);

    // Outflow rate bounding the explicit density update from below.
    double rate = 0.0;
    const double* cv = s.c.data();
    for (int a = 0; a < dim; ++a) {
        const double h = g.h(a);
        double grad_max = 0.0;
        for_each_interior_face(g, a, [&](std::size_t, std::size_t l, std::size_t r) {
            grad_max = std::max(grad_max, std::abs(cv[r] - cv[l]));
        });
        grad_max /= h;
        const double drift = chi * grad_max;
        const double umax = max_abs_component(s.u, a);
        if (drift > 0.0) {
            lim.drift = std::min(lim.drift, h / drift);
        }
        if (umax > 0.0) {
            lim.advective = std::min(lim.advective, h / umax);
        }
        rate += 2.0 / (h * h) + 2.0 * (drift + umax) / h;
    }
    const double mu_max = std::max(p.mu1, p.mu2);
    if (max_density > 0.0) {
        lim.reaction = 1.0 / (2.0 * mu_max * max_density);
        rate += mu_max * (1.0 + std::max(p.a1, p.a2)) * max_density;
    }
    lim.positivity = 1.0 / rate;

    const double limited =
        ctrl.cfl_safety * std::min({lim.diffusive, lim.drift, lim.advective, lim.reaction});
    lim.dt = std::min({ctrl.dt_max, limited, lim.positivity});
    if (!(lim.dt > 0.0) || !std::isfinite(lim.dt)) {
        std::ostringstream os;
        os << "compute_dt: nonpositive step limit " << lim.dt << " (" << dump(s, 0.0) << ")";
        throw SimulationAborted(os.str());
    }
    c_max = ec.max;
    return lim;
}

}  // namespace

DtLimits compute_dt_limits(const SimState& s, const StepControl& ctrl, const PhysicalParams& p)
{
    double c_max = 0.0;
    return dt_limits_and_signal_max(s, ctrl, p, c_max);
}

double compute_dt(const SimState& s, const StepControl& ctrl, const PhysicalParams& p)
{
    return compute_dt_limits(s, ctrl, p).dt;
}

std::pair<ScalarField, ScalarField> reaction_terms(const ScalarField& n1, const ScalarField& n2,
                                                   const PhysicalParams& p)
{
    ScalarField r1(n1.grid());
    ScalarField r2(n1.grid());
    for (std::size_t i = 0; i < n1.size(); ++i) {
        r1[i] = p.mu1 * n1[i] * (1.0 - n1[i] - p.a1 * n2[i]);
        r2[i] = p.mu2 * n2[i] * (1.0 - p.a2 * n1[i] - n2[i]);
    }
    return {std::move(r1), std::move(r2)};
}

ScalarField consumption_term(const ScalarField& n1, const ScalarField& n2, const ScalarField& c,
                             const PhysicalParams& p)
{
    ScalarField out(c.grid());
    for (std::size_t i = 0; i < c.size(); ++i) {
        out[i] = -(p.alpha * n1[i] + p.beta * n2[i]) * c[i];
    }
    return out;
}

StepWorkspace::StepWorkspace(const Grid& grid, const PhysicalParams& p, PoissonSettings poisson)
    : stokes_(grid, poisson),
      phi_(sample_potential(p.phi, grid)),
      grad_phi_(chemostokes::potential_gradient(p.phi, grid)),
      flux_(grid),
      force_(grid),
      tend1_(grid),
      tend2_(grid),
      tendc_(grid)
{
}

StepInfo advance(SimState& s, const StepControl& ctrl, const PhysicalParams& p, StepWorkspace& ws, double dt_cap)
{
    StepInfo info;
    const double dt = std::min(dt_limits_and_signal_max(s, ctrl, p, info.max_c_before).dt, dt_cap);
    if (!(dt > 0.0)) {
        throw SimulationAborted("advance: step size must be > 0 (" + dump(s, dt) + ")");
    }
    info.dt = dt;

    transport_tendency(s.n1, s.c, p.chi1, s.u, ws.flux_, ws.tend1_);
    transport_tendency(s.n2, s.c, p.chi2, s.u, ws.flux_, ws.tend2_);
    transport_tendency(s.c, s.c, 0.0, s.u, ws.flux_, ws.tendc_);

    double* n1 = s.n1.data();
    double* n2 = s.n2.data();
    double* c = s.c.data();
    const double* t1 = ws.tend1_.data();
    const double* t2 = ws.tend2_.data();
    const double* tc = ws.tendc_.data();
    const std::size_t count = s.n1.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    double lo1 = inf, hi1 = -inf, sum1 = 0.0;
    double lo2 = inf, hi2 = -inf, sum2 = 0.0;
    double loc = inf, hic = -inf, sumc = 0.0;
#pragma omp simd reduction(min : lo1, lo2, loc) reduction(max : hi1, hi2, hic) reduction(+ : sum1, sum2, sumc)
    for (std::size_t i = 0; i < count; ++i) {
        const double a = n1[i];
        const double b = n2[i];
        const double r1 = p.mu1 * a * (1.0 - a - p.a1 * b);
        const double r2 = p.mu2 * b * (1.0 - p.a2 * a - b);
        const double cn = (c[i] + dt * tc[i]) / (1.0 + dt * (p.alpha * a + p.beta * b));
        const double an = a + dt * (t1[i] + r1);
        const double bn = b + dt * (t2[i] + r2);
        c[i] = cn;
        n1[i] = an;
        n2[i] = bn;
        lo1 = std::min(lo1, an);
        hi1 = std::max(hi1, an);
        sum1 += an;
        lo2 = std::min(lo2, bn);
        hi2 = std::max(hi2, bn);
        sum2 += bn;
        loc = std::min(loc, cn);
        hic = std::max(hic, cn);
        sumc += cn;
    }
    const Extremes x1 = finish(lo1, hi1, sum1);
    const Extremes x2 = finish(lo2, hi2, sum2);
    const Extremes xc = finish(loc, hic, sumc);

    const auto guard_sign = [&](ScalarField& f, const char* name) {
        for (double& v : f.values()) {
            if (v < 0.0) {
                if (v < -kNegativityTolerance && ctrl.positivity == PositivityPolicy::Reject) {
                    std::ostringstream os;
                    os.precision(17);
                    os << "negative " << name << " = " << v << " (" << dump(s, dt) << ")";
                    throw SimulationAborted(os.str());
                }
                v = 0.0;
                ++info.clipped_cells;
            }
        }
    };

    if (!x1.finite || !x2.finite || !xc.finite) {
        throw SimulationAborted("non-finite state (" + dump(s, dt) + ")");
    }
    if (x1.min < 0.0) {
        guard_sign(s.n1, "n1");
    }
    if (x2.min < 0.0) {
        guard_sign(s.n2, "n2");
    }
    if (xc.min < 0.0) {
        guard_sign(s.c, "c");
    }

    // The mean-density part of the force is a pure gradient. Projecting it away
    // every step leaves round-off in u of the order of eps times the full force,
    // which stalls the velocity decay, so it goes straight into the pressure.
    // Any constant works here; clipping may have shifted the sums slightly.
    const double rho_mean = (p.gamma * sum1 + p.delta * sum2) / static_cast<double>(count);
    buoyancy_force(s.n1, s.n2, p, ws.grad_phi_, ws.force_, rho_mean);
    try {
        stokes_step(s.u, ws.force_, dt, ws.stokes_, s.pressure);
    }
    catch (const SolverError& e) {
        throw SimulationAborted(std::string("fluid solve failed: ") + e.what() + " (" + dump(s, dt) + ")");
    }
    if (rho_mean != 0.0) {
        const double* phi = ws.phi_.data();
        double* pr = s.pressure.data();
        double shift = 0.0;
        for (std::size_t i = 0; i < s.pressure.size(); ++i) {
            pr[i] -= rho_mean * phi[i];
            shift += pr[i];
        }
        shift /= static_cast<double>(s.pressure.size());
        for (std::size_t i = 0; i < s.pressure.size(); ++i) {
            pr[i] -= shift;
        }
    }

    s.t += dt;
    ++s.step;

    const double vol = s.grid().cell_volume();
    info.max_divu = ws.stokes_.last_max_divergence();
    for (int a = 0; a < s.grid().dim(); ++a) {
        info.max_u = std::max(info.max_u, max_abs_component(s.u, a));
    }
    info.min_n1 = std::max(x1.min, 0.0);
    info.min_n2 = std::max(x2.min, 0.0);
    info.min_c = std::max(xc.min, 0.0);
    info.max_n1 = x1.max;
    info.max_n2 = x2.max;
    info.max_c = xc.max;
    info.mass_n1 = x1.sum * vol;
    info.mass_n2 = x2.sum * vol;
    if (info.clipped_cells > 0) {
        const auto y1 = extremes(s.n1);
        const auto y2 = extremes(s.n2);
        const auto yc = extremes(s.c);
        info.min_n1 = y1.min;
        info.min_n2 = y2.min;
        info.min_c = yc.min;
        info.mass_n1 = y1.sum * vol;
        info.mass_n2 = y2.sum * vol;
    }
    return info;
}

SimState step(const SimState& s, const StepControl& ctrl, const PhysicalParams& p, StepWorkspace& ws)
{
    SimState out = s;
    advance(out, ctrl, p, ws);
    return out;
}

DiagnosticsRecord make_record(const SimState& s, const std::optional<SteadyState>& limit, const StepInfo& info,
                              const EnergyCoefficients& weights)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    DiagnosticsRecord r;
    r.t = s.t;
    r.mass_n1 = integrate(s.n1);
    r.mass_n2 = integrate(s.n2);
    r.linf_c = norm(s.c, NormKind::Inf);
    r.l2_c = norm(s.c, NormKind::L2);
    r.linf_u = norm(s.u, NormKind::Inf);
    r.l2_u = norm(s.u, NormKind::L2);
    r.min_n2 = *std::min_element(s.n2.values().begin(), s.n2.values().end());
    r.max_divu = info.max_divu;
    r.dt = info.dt;

    if (!limit) {
        r.linf_n1_dev = r.linf_n2_dev = nan;
        r.energy = r.dissipation = nan;
        r.energy_n1 = r.energy_n2 = r.energy_c = nan;
        return r;
    }
    double d1 = 0.0;
    double d2 = 0.0;
    for (std::size_t i = 0; i < s.n1.size(); ++i) {
        d1 = std::max(d1, std::abs(s.n1[i] - limit->n1_inf));
        d2 = std::max(d2, std::abs(s.n2[i] - limit->n2_inf));
    }
    r.linf_n1_dev = d1;
    r.linf_n2_dev = d2;

    try {
        EnergyParts parts;
        if (limit->regime == Regime::Coexistence) {
            parts = energy_parts_coexistence(s, limit->n1_inf, limit->n2_inf);
            r.dissipation = dissipation_coexistence(s, limit->n1_inf, limit->n2_inf);
        }
        else {
            parts = energy_parts_exclusion(s);
            r.dissipation = dissipation_exclusion(s);
        }
        r.energy_n1 = parts.species1;
        r.energy_n2 = parts.species2;
        r.energy_c = parts.signal;
        r.energy = parts.combine(weights);
    }
    catch (const ValidationError&) {
        // A density cell touched zero (clipping); the entropy is undefined there.
        r.energy = r.energy_n1 = r.energy_n2 = r.energy_c = nan;
        r.dissipation = limit->regime == Regime::Coexistence
                            ? dissipation_coexistence(s, limit->n1_inf, limit->n2_inf)
                            : dissipation_exclusion(s);
    }
    return r;
}

RunResult run(const SimulationSetup& setup, const RecordCallback& on_record)
{
    const auto wall_start = std::chrono::steady_clock::now();
    const PhysicalParams& p = setup.params;
    const StepControl& ctrl = setup.control;
    require_valid(p);
    if (!(ctrl.output_cadence > 0.0) || !(ctrl.end_time >= 0.0) || !(ctrl.dt_max > 0.0) ||
        !(ctrl.cfl_safety > 0.0 && ctrl.cfl_safety <= 1.0)) {
        throw ValidationError("step control: need cadence > 0, end time >= 0, dt_max > 0, safety in (0, 1]");
    }

    std::optional<SteadyState> limit;
    if (has_steady_state(p)) {
        limit = steady_state(p);
    }

    RunResult result;
    result.final_state = setup.initial;
    SimState& s = result.final_state;
    require_finite(s.n1, "n1");
    require_finite(s.n2, "n2");
    require_finite(s.c, "c");
    require_finite(s.u, "u");

    StepWorkspace ws(s.grid(), p, setup.poisson);
    InvariantLog& log = result.invariants;

    const double volume = s.grid().volume();
    const double mass_cap1 = std::max(integrate(s.n1), volume) * (1.0 + 1e-6);
    const double mass_cap2 = std::max(integrate(s.n2), volume) * (1.0 + 1e-6);

    StepInfo info;
    {
        const auto e1 = extremes(s.n1);
        const auto e2 = extremes(s.n2);
        const auto ec = extremes(s.c);
        log.min_n1 = e1.min;
        log.min_n2 = e2.min;
        log.min_c = ec.min;
        log.sup_n1 = e1.max;
        log.sup_n2 = e2.max;
        log.sup_density = std::max(std::abs(e1.min), e1.max) + std::max(std::abs(e2.min), e2.max);
        info.max_divu = max_abs_divergence(s.u);
    }

    const auto emit = [&](const StepInfo& i) {
        result.series.push_back(make_record(s, limit, i, setup.energy_weights));
        if (on_record) {
            on_record(result.series.back());
        }
    };
    emit(info);

    const double cadence = ctrl.output_cadence;
    std::int64_t tick = 1;
    try {
        while (s.t < ctrl.end_time) {
            const double next_tick = std::min(static_cast<double>(tick) * cadence, ctrl.end_time);
            info = advance(s, ctrl, p, ws, next_tick - s.t);
            ++log.steps;

            log.min_n1 = std::min(log.min_n1, info.min_n1);
            log.min_n2 = std::min(log.min_n2, info.min_n2);
            log.min_c = std::min(log.min_c, info.min_c);
            log.sup_n1 = std::max(log.sup_n1, info.max_n1);
            log.sup_n2 = std::max(log.sup_n2, info.max_n2);
            log.sup_density = std::max(log.sup_density, info.max_n1 + info.max_n2);
            log.clipped_cells += info.clipped_cells;
            const double c_increase = info.max_c - info.max_c_before;
            log.worst_c_increase = std::max(log.worst_c_increase, c_increase);
            if (c_increase > 1e-12) {
                ++log.c_max_violations;
                if (!log.first_c_violation_step) {
                    log.first_c_violation_step = s.step;
                }
            }
            const double div_ratio = info.max_divu / (1.0 + info.max_u);
            log.worst_divergence_ratio = std::max(log.worst_divergence_ratio, div_ratio);
            if (div_ratio > 1e-9) {
                ++log.divergence_violations;
            }
            if (info.mass_n1 > mass_cap1 || info.mass_n2 > mass_cap2) {
                ++log.mass_bound_violations;
            }

            if (std::max(info.max_n1, info.max_n2) > ctrl.density_ceiling) {
                std::ostringstream os;
                os << "density exceeded the blow-up ceiling " << ctrl.density_ceiling << " (" << dump(s, info.dt)
                   << ")";
                throw SimulationAborted(os.str());
            }

            // Land exactly on the tick to keep the record cadence uniform.
            if (s.t >= next_tick - 1e-12 * std::max(1.0, next_tick)) {
                s.t = next_tick;
                emit(info);
                ++tick;
            }

            if (ctrl.wall_clock_limit > 0.0) {
                const double elapsed =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
                if (elapsed > ctrl.wall_clock_limit) {
                    std::ostringstream os;
                    os << "wall-clock limit of " << ctrl.wall_clock_limit << " s exceeded at t = " << s.t;
                    throw SimulationAborted(os.str());
                }
            }
        }
    }
    catch (const SimulationAborted& e) {
        result.status = RunStatus::Aborted;
        result.message = e.what();
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return result;
}

}  // namespace chemostokes
