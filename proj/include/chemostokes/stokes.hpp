#pragma once

#include "chemostokes/fields.hpp"
#include "chemostokes/model.hpp"
#include "chemostokes/poisson.hpp"

namespace chemostokes {

/// Samples the potential at cell centres. A tabulated potential must match
/// the grid's cell count.
ScalarField sample_potential(const Potential& phi, const Grid& grid);

/// Face gradient of the sampled potential; boundary faces 0.
VectorField potential_gradient(const Potential& phi, const Grid& grid);

/// Face force (gamma n1 + delta n2)_face * (grad phi)_face with arithmetic-mean
/// face densities. Boundary faces carry 0.
VectorField buoyancy_force(const ScalarField& n1, const ScalarField& n2, const PhysicalParams& p);

/// In-place variant. A nonzero `reference` is subtracted from the face density
/// before multiplying by grad phi; the removed part reference * grad phi is an
/// exact discrete gradient and belongs to the pressure.
void buoyancy_force(const ScalarField& n1, const ScalarField& n2, const PhysicalParams& p,
                    const VectorField& grad_phi, VectorField& out, double reference = 0.0);

/// Buffers for one fluid solve. Not shareable between concurrent steps.
class StokesWorkspace {
public:
    explicit StokesWorkspace(const Grid& grid, PoissonSettings settings = {});

    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] NeumannPoisson& poisson() { return poisson_; }
    [[nodiscard]] const PoissonStats& last_poisson_stats() const { return last_stats_; }
    /// max |div u_new| after the last step or projection.
    [[nodiscard]] double last_max_divergence() const { return last_max_div_; }

private:
    friend void project(VectorField& u, double dt, StokesWorkspace& ws, ScalarField& pressure);
    friend void stokes_step(VectorField& u, const VectorField& force, double dt, StokesWorkspace& ws,
                            ScalarField& pressure);

    Grid grid_;
    NeumannPoisson poisson_;
    VectorField tentative_;
    ScalarField div_;
    ScalarField rhs_;
    PoissonStats last_stats_;
    double last_max_div_ = 0.0;
};

/// Viscous part of the momentum operator on interior faces of each component:
/// 2nd-order Laplacian with u = 0 on the walls (boundary faces for the normal
/// component, antisymmetric ghosts for tangential components).
void vector_laplacian_no_slip(const VectorField& u, VectorField& out);

/// Projects u onto discretely divergence-free fields with no-slip walls:
/// solves lap P = -div(u)/dt and sets u += dt grad P. The pressure enters the
/// momentum equation as +grad P and has zero mean.
void project(VectorField& u, double dt, StokesWorkspace& ws, ScalarField& pressure);

/// One projection step of u_t = lap u + grad P + force, div u = 0:
/// u* = u + dt (lap u + force), then project(u*). In place.
/// Throws SolverError if the Poisson solve fails or the projected field
/// violates max|div u| <= 1e-9 (U + 1), U = max(|u*|, |u_new|).
void stokes_step(VectorField& u, const VectorField& force, double dt, StokesWorkspace& ws, ScalarField& pressure);

struct StokesResult {
    VectorField u;
    ScalarField pressure;
};

StokesResult stokes_step(const VectorField& u, const VectorField& force, double dt, StokesWorkspace& ws);

}  // namespace chemostokes
