#include "chemostokes/errors.hpp"
#include "chemostokes/integrator.hpp"
#include "chemostokes/operators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace chemostokes;

namespace {

PhysicalParams coexistence_params()
{
    PhysicalParams p;
    p.chi1 = 0.3;
    p.chi2 = 0.2;
    p.a1 = 0.5;
    p.a2 = 0.4;
    p.phi.slope = {0.0, 1.0, 0.0};
    return p;
}

ScalarField random_positive(const Grid& g, std::uint64_t seed, double lo, double hi)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    ScalarField f(g);
    for (double& v : f.values()) {
        v = u(rng);
    }
    return f;
}

SimState random_state(const Grid& g, std::uint64_t seed)
{
    return make_state(random_positive(g, seed, 0.2, 1.5), random_positive(g, seed + 1, 0.2, 1.5),
                      random_positive(g, seed + 2, 0.0, 1.0));
}

SimulationSetup small_setup(double end_time)
{
    const Grid g = Grid::box(2, {12, 12, 1}, {1.0, 1.0, 1.0});
    SimulationSetup setup;
    setup.params = coexistence_params();
    setup.initial = make_state(
        init_from_function(g, [](const Vec3& x) { return 1.0 + 0.3 * std::cos(std::numbers::pi * x[0]); }),
        init_from_function(g, [](const Vec3& x) { return 0.8 + 0.2 * std::cos(2 * std::numbers::pi * x[1]); }),
        init_from_function(g, [](const Vec3& x) { return 0.5 + 0.4 * std::cos(std::numbers::pi * x[1]); }));
    setup.control.end_time = end_time;
    setup.control.output_cadence = 0.01;
    return setup;
}

}  // namespace

TEST(ComputeDt, DiffusionLimitedExample)
{
    const Grid g(2, {10, 10, 1}, {0.1, 0.1, 1});
    const SimState s = make_state(ScalarField(g, 1.0), ScalarField(g, 0.5), ScalarField(g, 0.3));
    PhysicalParams p;
    p.chi1 = p.chi2 = 1.0;
    StepControl ctrl;
    const DtLimits lim = compute_dt_limits(s, ctrl, p);
    EXPECT_DOUBLE_EQ(lim.diffusive, 0.0025);
    EXPECT_DOUBLE_EQ(lim.reaction, 0.5);
    EXPECT_EQ(lim.drift, std::numeric_limits<double>::infinity());
    EXPECT_EQ(lim.advective, std::numeric_limits<double>::infinity());
    EXPECT_NEAR(compute_dt(s, ctrl, p), 0.001, 1e-15);
}

TEST(ComputeDt, AllZeroFieldsOnlyDiffusionActive)
{
    const Grid g(2, {8, 8, 1}, {1.0, 1.0, 1});
    const SimState s = make_state(ScalarField(g), ScalarField(g), ScalarField(g));
    StepControl ctrl;
    ctrl.dt_max = 0.01;
    EXPECT_DOUBLE_EQ(compute_dt(s, ctrl, PhysicalParams{}), 0.01);
    ctrl.dt_max = 1.0;
    EXPECT_DOUBLE_EQ(compute_dt(s, ctrl, PhysicalParams{}), 0.4 * 1.0 / 4.0);
}

TEST(ComputeDt, LargeVelocityShrinksStepProportionally)
{
    const Grid g(2, {8, 8, 1}, {0.1, 0.1, 1});
    SimState s = make_state(ScalarField(g, 0.5), ScalarField(g, 0.5), ScalarField(g, 0.5));
    const StepControl ctrl;
    const PhysicalParams p;
    s.u.at(0, 3, 3) = 1e4;
    const double dt1 = compute_dt(s, ctrl, p);
    s.u.at(0, 3, 3) = 2e4;
    const double dt2 = compute_dt(s, ctrl, p);
    EXPECT_NEAR(dt1 / dt2, 2.0, 1e-9);
    EXPECT_LE(dt1, 0.4 * 0.1 / 1e4 * (1 + 1e-12));
}

TEST(ComputeDt, NonFiniteStateAborts)
{
    const Grid g(2, {4, 4, 1}, {1, 1, 1});
    SimState s = make_state(ScalarField(g, 1.0), ScalarField(g, 1.0), ScalarField(g));
    s.n2(1, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(compute_dt(s, StepControl{}, PhysicalParams{}), SimulationAborted);
}

TEST(Kinetics, ReactionExamples)
{
    const Grid g(1, {3, 1, 1}, {1, 1, 1});
    PhysicalParams p;
    p.a2 = 0.5;
    const auto [r1, r2] = reaction_terms(ScalarField(g, 0.5), ScalarField(g, 0.0), p);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_DOUBLE_EQ(r1[i], 0.25);
        EXPECT_EQ(r2[i], 0.0);
    }
    const auto [z1, z2] = reaction_terms(ScalarField(g), ScalarField(g), p);
    EXPECT_EQ(z1[0], 0.0);
    EXPECT_EQ(z2[0], 0.0);
}

TEST(Kinetics, CoexistenceSteadyStateAnnihilates)
{
    const Grid g(2, {3, 3, 1}, {1, 1, 1});
    const PhysicalParams p = coexistence_params();
    const SteadyState ss = steady_state(p);
    const auto [r1, r2] = reaction_terms(ScalarField(g, ss.n1_inf), ScalarField(g, ss.n2_inf), p);
    for (std::size_t i = 0; i < r1.size(); ++i) {
        EXPECT_NEAR(r1[i], 0.0, 1e-15);
        EXPECT_NEAR(r2[i], 0.0, 1e-15);
    }
}

TEST(Kinetics, ConsumptionExamples)
{
    const Grid g(1, {3, 1, 1}, {1, 1, 1});
    const PhysicalParams p;
    EXPECT_DOUBLE_EQ(consumption_term(ScalarField(g, 1.0), ScalarField(g, 1.0), ScalarField(g, 2.0), p)[1], -4.0);
    EXPECT_EQ(consumption_term(ScalarField(g, 1.0), ScalarField(g, 1.0), ScalarField(g), p)[1], 0.0);
    EXPECT_EQ(consumption_term(ScalarField(g), ScalarField(g), ScalarField(g, 2.0), p)[1], 0.0);
}

TEST(Step, HomogeneousSteadyStateIsFixed)
{
    const Grid g(2, {8, 8, 1}, {0.125, 0.125, 1});
    const PhysicalParams p = coexistence_params();
    const SteadyState ss = steady_state(p);
    SimState s = make_state(ScalarField(g, ss.n1_inf), ScalarField(g, ss.n2_inf), ScalarField(g));
    StepWorkspace ws(g, p);
    StepControl ctrl;
    for (int k = 0; k < 20; ++k) {
        advance(s, ctrl, p, ws);
    }
    for (std::size_t i = 0; i < s.n1.size(); ++i) {
        EXPECT_NEAR(s.n1[i], ss.n1_inf, 1e-14);
        EXPECT_NEAR(s.n2[i], ss.n2_inf, 1e-14);
        EXPECT_EQ(s.c[i], 0.0);
    }
    EXPECT_LT(norm(s.u, NormKind::Inf), 1e-12);
    EXPECT_EQ(s.step, 20);
}

TEST(Step, UniformDensityBuoyancyIsCarriedByPressure)
{
    // Uniform densities under a sloped potential: the force is a pure
    // gradient, so u stays exactly zero and P balances it hydrostatically.
    const Grid g(2, {8, 8, 1}, {0.125, 0.125, 1});
    PhysicalParams p = coexistence_params();
    p.phi.slope = {0.3, 1.0, 0.0};
    const SteadyState ss = steady_state(p);
    SimState s = make_state(ScalarField(g, ss.n1_inf), ScalarField(g, ss.n2_inf), ScalarField(g));
    StepWorkspace ws(g, p);
    advance(s, StepControl{}, p, ws);
    EXPECT_EQ(norm(s.u, NormKind::Inf), 0.0);

    const double rho = p.gamma * ss.n1_inf + p.delta * ss.n2_inf;
    const ScalarField phi = sample_potential(p.phi, g);
    double phi_mean = 0.0;
    for (double v : phi.values()) {
        phi_mean += v;
    }
    phi_mean /= static_cast<double>(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) {
        EXPECT_NEAR(s.pressure[i], -rho * (phi[i] - phi_mean), 1e-13);
    }
}

TEST(Step, UniformSignalWithoutConsumersIsUnchanged)
{
    const Grid g(2, {6, 6, 1}, {0.2, 0.2, 1});
    const PhysicalParams p;
    SimState s = make_state(ScalarField(g), ScalarField(g), ScalarField(g, 0.7));
    StepWorkspace ws(g, p);
    const SimState next = step(s, StepControl{}, p, ws);
    for (std::size_t i = 0; i < s.c.size(); ++i) {
        EXPECT_EQ(next.c[i], 0.7);
    }
    EXPECT_GT(next.t, 0.0);
}

TEST(Step, MassChangesOnlyThroughKinetics)
{
    const Grid g(2, {10, 9, 1}, {0.1, 0.11, 1});
    const PhysicalParams p = coexistence_params();
    SimState s = random_state(g, 3);
    StepWorkspace ws(g, p);
    // Give the state a nontrivial divergence-free velocity first.
    for (int k = 0; k < 3; ++k) {
        advance(s, StepControl{}, p, ws);
    }
    ASSERT_GT(norm(s.u, NormKind::Inf), 0.0);
    const auto [r1, r2] = reaction_terms(s.n1, s.n2, p);
    const double m1 = integrate(s.n1);
    const double m2 = integrate(s.n2);
    const StepInfo info = advance(s, StepControl{}, p, ws);
    EXPECT_NEAR(integrate(s.n1), m1 + info.dt * integrate(r1), 1e-12 * m1);
    EXPECT_NEAR(integrate(s.n2), m2 + info.dt * integrate(r2), 1e-12 * m2);
    EXPECT_DOUBLE_EQ(info.mass_n1, integrate(s.n1));
}

TEST(Step, SignalMaximumDoesNotGrow)
{
    const Grid g(2, {10, 10, 1}, {0.1, 0.1, 1});
    const PhysicalParams p = coexistence_params();
    SimState s = random_state(g, 9);
    StepWorkspace ws(g, p);
    for (int k = 0; k < 50; ++k) {
        const StepInfo info = advance(s, StepControl{}, p, ws);
        ASSERT_LE(info.max_c, info.max_c_before + 1e-12);
        ASSERT_GE(info.min_n1, 0.0);
        ASSERT_GE(info.min_n2, 0.0);
        ASSERT_GE(info.min_c, 0.0);
        ASSERT_LE(info.max_divu, 1e-9 * (1.0 + info.max_u));
    }
}

TEST(Step, DtCapIsHonoured)
{
    const Grid g(2, {6, 6, 1}, {0.2, 0.2, 1});
    const PhysicalParams p;
    SimState s = random_state(g, 4);
    StepWorkspace ws(g, p);
    const StepInfo info = advance(s, StepControl{}, p, ws, 1e-6);
    EXPECT_EQ(info.dt, 1e-6);
    EXPECT_EQ(s.t, 1e-6);
}

TEST(Step, NegativeDensityAbortsUnderReject)
{
    const Grid g(2, {6, 6, 1}, {0.2, 0.2, 1});
    const PhysicalParams p;
    SimState s = random_state(g, 5);
    s.n1(2, 2) = -5.0;
    StepWorkspace ws(g, p);
    try {
        advance(s, StepControl{}, p, ws);
        FAIL() << "expected SimulationAborted";
    }
    catch (const SimulationAborted& e) {
        EXPECT_NE(std::string(e.what()).find("n1"), std::string::npos);
    }
}

TEST(Step, ClipPolicyZeroesAndCounts)
{
    const Grid g(2, {6, 6, 1}, {0.2, 0.2, 1});
    const PhysicalParams p;
    SimState s = random_state(g, 5);
    s.n1(2, 2) = -5.0;
    StepWorkspace ws(g, p);
    StepControl ctrl;
    ctrl.positivity = PositivityPolicy::Clip;
    const StepInfo info = advance(s, ctrl, p, ws);
    EXPECT_GT(info.clipped_cells, 0);
    for (double v : s.n1.values()) {
        EXPECT_GE(v, 0.0);
    }
}

TEST(Run, ZeroEndTimeGivesInitialRecordOnly)
{
    const SimulationSetup setup = small_setup(0.0);
    const RunResult r = run(setup);
    EXPECT_EQ(r.status, RunStatus::Completed);
    ASSERT_EQ(r.series.size(), 1U);
    EXPECT_EQ(r.series[0].t, 0.0);
    EXPECT_EQ(r.invariants.steps, 0);
    for (std::size_t i = 0; i < r.final_state.n1.size(); ++i) {
        EXPECT_EQ(r.final_state.n1[i], setup.initial.n1[i]);
    }
}

TEST(Run, RecordsLandOnCadenceAndInvariantsHold)
{
    const SimulationSetup setup = small_setup(0.1);
    int callbacks = 0;
    const RunResult r = run(setup, [&](const DiagnosticsRecord&) { ++callbacks; });
    ASSERT_EQ(r.status, RunStatus::Completed) << r.message;
    ASSERT_EQ(r.series.size(), 11U);
    EXPECT_EQ(callbacks, 11);
    for (std::size_t i = 0; i < r.series.size(); ++i) {
        EXPECT_NEAR(r.series[i].t, 0.01 * static_cast<double>(i), 1e-14);
    }
    EXPECT_EQ(r.series.back().t, 0.1);
    EXPECT_TRUE(r.invariants.ok());
    EXPECT_LE(r.invariants.worst_c_increase, 1e-12);
    const SteadyState ss = steady_state(setup.params);
    for (const auto& rec : r.series) {
        EXPECT_TRUE(std::isfinite(rec.energy));
        EXPECT_GE(rec.energy, 0.0);
        EXPECT_GE(rec.dissipation, 0.0);
        EXPECT_NEAR(rec.energy, rec.energy_n1 + rec.energy_n2 + 0.5 * rec.energy_c, 1e-12 * (1 + rec.energy));
    }
    EXPECT_GT(ss.n1_inf, 0.0);
}

TEST(Run, NegativeInitialDataAbortsWithPartialSeries)
{
    SimulationSetup setup = small_setup(0.05);
    setup.initial.n2(3, 3) = -1.0;
    const RunResult r = run(setup);
    EXPECT_EQ(r.status, RunStatus::Aborted);
    EXPECT_FALSE(r.message.empty());
    EXPECT_GE(r.series.size(), 1U);
}

TEST(Run, UnsupportedRegimeWritesNanColumns)
{
    SimulationSetup setup = small_setup(0.02);
    setup.params.a1 = 1.5;
    setup.params.a2 = 1.5;
    const RunResult r = run(setup);
    ASSERT_EQ(r.status, RunStatus::Completed) << r.message;
    for (const auto& rec : r.series) {
        EXPECT_TRUE(std::isnan(rec.energy));
        EXPECT_TRUE(std::isnan(rec.linf_n1_dev));
        EXPECT_TRUE(std::isfinite(rec.mass_n1));
    }
}

TEST(Run, Deterministic)
{
    const SimulationSetup setup = small_setup(0.05);
    const RunResult a = run(setup);
    const RunResult b = run(setup);
    ASSERT_EQ(a.series.size(), b.series.size());
    for (std::size_t i = 0; i < a.series.size(); ++i) {
        EXPECT_EQ(a.series[i].energy, b.series[i].energy);
        EXPECT_EQ(a.series[i].l2_u, b.series[i].l2_u);
        EXPECT_EQ(a.series[i].mass_n2, b.series[i].mass_n2);
    }
    for (std::size_t i = 0; i < a.final_state.n1.size(); ++i) {
        ASSERT_EQ(a.final_state.n1[i], b.final_state.n1[i]);
    }
}
