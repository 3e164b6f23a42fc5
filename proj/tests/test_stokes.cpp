#include "chemostokes/errors.hpp"
#include "chemostokes/operators.hpp"
#include "chemostokes/stokes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace chemostokes;

namespace {

VectorField random_velocity(const Grid& g, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VectorField v(g);
    for (int a = 0; a < g.dim(); ++a) {
        for (double& x : v.component(a)) {
            x = u(rng);
        }
    }
    v.enforce_no_slip();
    return v;
}

double max_abs(const VectorField& v)
{
    double m = 0.0;
    for (int a = 0; a < v.grid().dim(); ++a) {
        for (double x : v.component(a)) {
            m = std::max(m, std::abs(x));
        }
    }
    return m;
}

PhysicalParams vertical_gravity()
{
    PhysicalParams p;
    p.phi.slope = {0.0, 1.0, 0.0};
    return p;
}

}  // namespace

TEST(Buoyancy, UniformDensitiesUnderLinearPotential)
{
    const Grid g(2, {4, 5, 1}, {0.25, 0.2, 1});
    const auto f = buoyancy_force(ScalarField(g, 1.0), ScalarField(g, 1.0), vertical_gravity());
    for (int j = 0; j <= 5; ++j) {
        for (int i = 0; i < 4; ++i) {
            const double expected = (j == 0 || j == 5) ? 0.0 : 2.0;
            EXPECT_NEAR(f.at(1, i, j), expected, 1e-13) << i << "," << j;
        }
    }
    for (double v : f.component(0)) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Buoyancy, UnitSlopeAlongX)
{
    const Grid g(2, {5, 3, 1}, {0.2, 1.0 / 3.0, 1});
    PhysicalParams p;
    p.phi.slope = {1.0, 0.0, 0.0};
    const auto f = buoyancy_force(ScalarField(g, 1.0), ScalarField(g, 1.0), p);
    for (int j = 0; j < 3; ++j) {
        for (int i = 1; i < 5; ++i) {
            EXPECT_NEAR(f.at(0, i, j), 2.0, 1e-13);
        }
    }
    const auto none = buoyancy_force(ScalarField(g), ScalarField(g), p);
    EXPECT_EQ(max_abs(none), 0.0);
}

TEST(Buoyancy, ConstantPotentialGivesNoForce)
{
    const Grid g(2, {4, 4, 1}, {1, 1, 1});
    PhysicalParams p;
    p.phi.kind = PotentialKind::Tabulated;
    p.phi.table.assign(g.cell_count(), 3.0);
    const auto f = buoyancy_force(ScalarField(g, 2.0), ScalarField(g, 0.5), p);
    EXPECT_EQ(max_abs(f), 0.0);
}

TEST(Buoyancy, TableSizeChecked)
{
    const Grid g(2, {4, 4, 1}, {1, 1, 1});
    PhysicalParams p;
    p.phi.kind = PotentialKind::Tabulated;
    p.phi.table.assign(15, 0.0);
    EXPECT_THROW(buoyancy_force(ScalarField(g, 1.0), ScalarField(g, 1.0), p), ValidationError);
}

TEST(VectorLaplacian, TangentialWallGhostsAreAntisymmetric)
{
    const Grid g(2, {4, 4, 1}, {0.5, 0.5, 1});
    VectorField u(g);
    for (int j = 0; j < 4; ++j) {
        for (int i = 1; i < 4; ++i) {
            u.at(0, i, j) = 1.0;
        }
    }
    VectorField lap(g);
    vector_laplacian_no_slip(u, lap);
    // Along x the middle face sees (1, 1, 1); the outer interior faces see a
    // zero boundary face on one side.
    const double wall = (-1.0 - 2.0 + 1.0) / 0.25;
    const double edge = (0.0 - 2.0 + 1.0) / 0.25;
    for (int i = 1; i < 4; ++i) {
        const double along = i == 2 ? 0.0 : edge;
        EXPECT_DOUBLE_EQ(lap.at(0, i, 0), wall + along);
        EXPECT_DOUBLE_EQ(lap.at(0, i, 1), along);
        EXPECT_DOUBLE_EQ(lap.at(0, i, 2), along);
        EXPECT_DOUBLE_EQ(lap.at(0, i, 3), wall + along);
    }
    for (int j = 0; j < 4; ++j) {
        EXPECT_EQ(lap.at(0, 0, j), 0.0);
        EXPECT_EQ(lap.at(0, 4, j), 0.0);
    }
}

TEST(VectorLaplacian, NormalComponentSeesZeroWalls)
{
    const Grid g(1, {4, 1, 1}, {1, 1, 1});
    VectorField u(g);
    u.at(0, 1) = 1.0;
    u.at(0, 2) = 1.0;
    u.at(0, 3) = 1.0;
    VectorField lap(g);
    vector_laplacian_no_slip(u, lap);
    EXPECT_DOUBLE_EQ(lap.at(0, 1), -1.0);
    EXPECT_DOUBLE_EQ(lap.at(0, 2), 0.0);
    EXPECT_DOUBLE_EQ(lap.at(0, 3), -1.0);
}

TEST(Projection, DivergenceFreeAndIdempotent)
{
    for (int dim = 2; dim <= 3; ++dim) {
        const Grid g(dim, {10, 8, 6}, {0.1, 0.125, 0.2});
        StokesWorkspace ws(g);
        auto u = random_velocity(g, 30 + dim);
        ScalarField p(g);
        project(u, 1e-3, ws, p);
        EXPECT_LE(max_abs_divergence(u), 1e-9 * (1.0 + max_abs(u)));
        EXPECT_EQ(ws.last_max_divergence(), max_abs_divergence(u));
        double mean = 0.0;
        for (double v : p.values()) {
            mean += v;
        }
        EXPECT_NEAR(mean / static_cast<double>(p.size()), 0.0, 1e-10);

        const VectorField once = u;
        project(u, 1e-3, ws, p);
        for (int a = 0; a < dim; ++a) {
            for (std::size_t i = 0; i < once.component(a).size(); ++i) {
                ASSERT_NEAR(u.component(a)[i], once.component(a)[i], 1e-12);
            }
        }
        for (int a = 0; a < dim; ++a) {
            const auto e = g.face_extents(a);
            Index3 idx{0, 0, 0};
            for (int side = 0; side < 2; ++side) {
                idx = {0, 0, 0};
                idx[a] = side == 0 ? 0 : e[a] - 1;
                EXPECT_EQ(u.at(a, idx[0], idx[1], idx[2]), 0.0);
            }
        }
    }
}

TEST(StokesStep, GradientForceIsAbsorbedByPressure)
{
    const Grid g(2, {16, 16, 1}, {1.0 / 16, 1.0 / 16, 1});
    const auto q = init_from_function(g, [](const Vec3& x) { return std::sin(3.0 * x[0]) * std::cos(2.0 * x[1]) + x[1]; });
    const VectorField f = gradient(q);
    StokesWorkspace ws(g);
    const auto r = stokes_step(VectorField(g), f, 1e-3, ws);
    EXPECT_LE(norm(r.u, NormKind::L2), 1e-8 * norm(f, NormKind::L2));
    EXPECT_GT(norm(r.pressure, NormKind::L2), 0.0);
}

TEST(StokesStep, ViscousDecayWithoutForcing)
{
    const Grid g(2, {12, 12, 1}, {1.0 / 12, 1.0 / 12, 1});
    StokesWorkspace ws(g);
    auto u = random_velocity(g, 77);
    ScalarField p(g);
    project(u, 1.0, ws, p);
    const VectorField zero(g);
    const double dt = 0.2 * g.h(0) * g.h(0);
    double prev = norm(u, NormKind::L2);
    const double start = prev;
    for (int s = 0; s < 200; ++s) {
        stokes_step(u, zero, dt, ws, p);
        const double now = norm(u, NormKind::L2);
        ASSERT_LE(now, prev * (1.0 + 1e-12)) << "step " << s;
        prev = now;
    }
    EXPECT_LT(prev, 0.5 * start);
}

TEST(StokesStep, SpectralAndCgPathsAgree)
{
    const Grid g(2, {10, 7, 1}, {0.1, 0.1, 1});
    const auto u0 = random_velocity(g, 5);
    const auto f = random_velocity(g, 6);
    StokesWorkspace a(g, {PoissonMethod::Spectral});
    StokesWorkspace b(g, {PoissonMethod::ConjugateGradient, 1e-13});
    const auto ra = stokes_step(u0, f, 1e-3, a);
    const auto rb = stokes_step(u0, f, 1e-3, b);
    for (int ax = 0; ax < 2; ++ax) {
        for (std::size_t i = 0; i < ra.u.component(ax).size(); ++i) {
            EXPECT_NEAR(ra.u.component(ax)[i], rb.u.component(ax)[i], 1e-10);
        }
    }
}

TEST(StokesStep, RejectsNonPositiveDt)
{
    const Grid g(2, {4, 4, 1}, {1, 1, 1});
    StokesWorkspace ws(g);
    EXPECT_THROW(stokes_step(VectorField(g), VectorField(g), 0.0, ws), ValidationError);
}
