#include "chemostokes/stokes.hpp"

#include "chemostokes/detail/reduce.hpp"
#include "chemostokes/detail/stencil.hpp"
#include "chemostokes/errors.hpp"
#include "chemostokes/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chemostokes {

using detail::for_each_interior_face;

ScalarField sample_potential(const Potential& phi, const Grid& grid)
{
    switch (phi.kind) {
    case PotentialKind::Linear:
        return init_from_function(grid, [&](const Vec3& x) {
            return phi.slope[0] * x[0] + phi.slope[1] * x[1] + phi.slope[2] * x[2];
        });
    case PotentialKind::Tabulated: {
        if (phi.table.size() != grid.cell_count()) {
            std::ostringstream os;
            os << "tabulated potential has " << phi.table.size() << " values, grid has " << grid.cell_count()
               << " cells";
            throw ValidationError(os.str());
        }
        ScalarField f(grid);
        std::copy(phi.table.begin(), phi.table.end(), f.values().begin());
        require_finite(f, "potential");
        return f;
    }
    }
    throw ValidationError("unknown potential kind");
}

VectorField potential_gradient(const Potential& phi, const Grid& grid)
{
    VectorField g = gradient(sample_potential(phi, grid));
    require_finite(g, "potential gradient");
    return g;
}

void buoyancy_force(const ScalarField& n1, const ScalarField& n2, const PhysicalParams& p,
                    const VectorField& grad_phi, VectorField& out, double reference)
{
    const Grid& g = n1.grid();
    const double* a = n1.data();
    const double* b = n2.data();
    const double hg = 0.5 * p.gamma;
    const double hd = 0.5 * p.delta;
    for (int axis = 0; axis < g.dim(); ++axis) {
        const double* gp = grad_phi.component(axis).data();
        double* o = out.component(axis).data();
        for_each_interior_face(g, axis, [&](std::size_t face, std::size_t l, std::size_t r) {
            o[face] = (hg * (a[l] + a[r]) + hd * (b[l] + b[r]) - reference) * gp[face];
        });
    }
}

VectorField buoyancy_force(const ScalarField& n1, const ScalarField& n2, const PhysicalParams& p)
{
    const VectorField gp = potential_gradient(p.phi, n1.grid());
    VectorField out(n1.grid());
    buoyancy_force(n1, n2, p, gp, out);
    return out;
}

StokesWorkspace::StokesWorkspace(const Grid& grid, PoissonSettings settings)
    : grid_(grid), poisson_(grid, settings), tentative_(grid), div_(grid), rhs_(grid)
{
}

void vector_laplacian_no_slip(const VectorField& u, VectorField& out)
{
    const Grid& g = u.grid();
    const int dim = g.dim();
    for (int a = 0; a < dim; ++a) {
        const auto e = g.face_extents(a);
        const std::size_t fstride[3] = {1, static_cast<std::size_t>(e[0]),
                                        static_cast<std::size_t>(e[0]) * static_cast<std::size_t>(e[1])};
        double inv_h2[3];
        for (int b = 0; b < 3; ++b) {
            inv_h2[b] = 1.0 / (g.h(b) * g.h(b));
        }
        const double* uc = u.component(a).data();
        double* o = out.component(a).data();
        std::fill(o, o + g.face_count(a), 0.0);

        Index3 lo{0, 0, 0};
        Index3 hi = e;
        lo[a] = 1;
        hi[a] = e[a] - 1;
        for (int k = lo[2]; k < hi[2]; ++k) {
            for (int j = lo[1]; j < hi[1]; ++j) {
                const std::size_t row = fstride[1] * static_cast<std::size_t>(j) +
                                        fstride[2] * static_cast<std::size_t>(k);
                const double* r = uc + row;
                double* orow = o + row;
                // Neighbour rows along y and z; nullptr marks a wall half a cell
                // away, where the antisymmetric ghost -u gives u = 0 on the wall.
                const double* lower[3] = {nullptr, nullptr, nullptr};
                const double* upper[3] = {nullptr, nullptr, nullptr};
                const int idx[3] = {0, j, k};
                for (int b = 1; b < dim; ++b) {
                    const bool wall_lo = b != a && idx[b] == 0;
                    const bool wall_hi = b != a && idx[b] == e[b] - 1;
                    lower[b] = wall_lo ? nullptr : r - fstride[b];
                    upper[b] = wall_hi ? nullptr : r + fstride[b];
                }
                const auto cross = [&](int i, double c) {
                    double sum = 0.0;
                    for (int b = 1; b < dim; ++b) {
                        const double lv = lower[b] ? lower[b][i] : -c;
                        const double uv = upper[b] ? upper[b][i] : -c;
                        sum += (uv - 2.0 * c + lv) * inv_h2[b];
                    }
                    return sum;
                };
                if (a == 0) {
                    for (int i = 1; i < e[0] - 1; ++i) {
                        const double c = r[i];
                        orow[i] = (r[i + 1] - 2.0 * c + r[i - 1]) * inv_h2[0] + cross(i, c);
                    }
                    continue;
                }
                const int n0 = e[0];
                for (int i = 0; i < n0; ++i) {
                    const double c = r[i];
                    const double lv = i == 0 ? -c : r[i - 1];
                    const double uv = i == n0 - 1 ? -c : r[i + 1];
                    orow[i] = (uv - 2.0 * c + lv) * inv_h2[0] + cross(i, c);
                }
            }
        }
    }
}

namespace {

double max_abs(const VectorField& v)
{
    double m = 0.0;
    for (int a = 0; a < v.grid().dim(); ++a) {
        const double c = detail::max_abs(v.component(a));
        if (std::isnan(c)) {
            return c;
        }
        m = std::max(m, c);
    }
    return m;
}

double max_abs(const ScalarField& f)
{
    return detail::max_abs(f.values());
}

}  // namespace

void project(VectorField& u, double dt, StokesWorkspace& ws, ScalarField& pressure)
{
    if (!(dt > 0.0)) {
        throw ValidationError("projection needs dt > 0");
    }
    const Grid& g = u.grid();
    divergence(u, ws.div_);
    // With zero normal flow on the walls the divergence sums to zero exactly;
    // whatever mean it carries is round-off, which matters once |div u| itself
    // is at round-off level (for instance when re-projecting).
    const double scale = -1.0 / dt;
    double mean = 0.0;
    for (std::size_t i = 0; i < ws.rhs_.size(); ++i) {
        ws.rhs_[i] = scale * ws.div_[i];
        mean += ws.rhs_[i];
    }
    mean /= static_cast<double>(ws.rhs_.size());
    for (double& v : ws.rhs_.values()) {
        v -= mean;
    }
    ws.last_stats_ = ws.poisson_.solve(ws.rhs_, pressure);

    const double* pv = pressure.data();
    for (int a = 0; a < g.dim(); ++a) {
        double* uc = u.component(a).data();
        const double coef = dt / g.h(a);
        for_each_interior_face(g, a, [&](std::size_t face, std::size_t l, std::size_t r) {
            uc[face] += coef * (pv[r] - pv[l]);
        });
    }
    divergence(u, ws.div_);
    ws.last_max_div_ = max_abs(ws.div_);
}

void stokes_step(VectorField& u, const VectorField& force, double dt, StokesWorkspace& ws, ScalarField& pressure)
{
    if (!(dt > 0.0)) {
        throw ValidationError("stokes_step needs dt > 0");
    }
    const Grid& g = u.grid();
    VectorField& lap = ws.tentative_;
    vector_laplacian_no_slip(u, lap);
    for (int a = 0; a < g.dim(); ++a) {
        double* uc = u.component(a).data();
        const double* lc = lap.component(a).data();
        const double* fc = force.component(a).data();
        for_each_interior_face(g, a, [&](std::size_t face, std::size_t, std::size_t) {
            uc[face] += dt * (lc[face] + fc[face]);
        });
    }
    const double tentative_scale = max_abs(u);
    project(u, dt, ws, pressure);

    const double scale = std::max(tentative_scale, max_abs(u));
    if (!(ws.last_max_div_ <= 1e-9 * (scale + 1.0))) {
        std::ostringstream os;
        os << "stokes_step: projected velocity has max |div u| = " << ws.last_max_div_
           << " (pressure magnitude " << max_abs(pressure) << ")";
        throw SolverError(os.str());
    }
}

StokesResult stokes_step(const VectorField& u, const VectorField& force, double dt, StokesWorkspace& ws)
{
    StokesResult out{u, ScalarField(u.grid())};
    stokes_step(out.u, force, dt, ws, out.pressure);
    return out;
}

}  // namespace chemostokes
