#pragma once

#include "chemostokes/fields.hpp"

namespace chemostokes {

// Spatial operators on the staggered box grid. All boundaries are zero-flux:
// scalars use mirrored ghost cells, so boundary-face gradients and fluxes
// vanish and every divergence-form operator integrates to zero.
//
// Each operator comes as a value-returning function and an overload writing
// into a preallocated output (used by the time stepper).

/// Second-order cell Laplacian with homogeneous Neumann data.
/// Bit-identical to divergence(gradient(f)).
ScalarField laplacian_neumann(const ScalarField& f);
void laplacian_neumann(const ScalarField& f, ScalarField& out);

/// Face differences (f_right - f_left) / h; boundary faces 0.
VectorField gradient(const ScalarField& f);
void gradient(const ScalarField& f, VectorField& out);

/// Cell value sum over axes of (v_right - v_left) / h.
ScalarField divergence(const VectorField& v);
void divergence(const VectorField& v, ScalarField& out);

/// Conservative upwind advection tendency div(u f), to be subtracted.
/// Warns on stderr when div u is not negligible.
ScalarField advect(const ScalarField& f, const VectorField& u);
void advect(const ScalarField& f, const VectorField& u, ScalarField& out);

/// div(chi * n * grad c) with donor-cell n on each face: the upwind side
/// relative to the sign of the face gradient of c.
ScalarField chemo_divergence(const ScalarField& n, const ScalarField& c, double chi);
void chemo_divergence(const ScalarField& n, const ScalarField& c, double chi, ScalarField& out);

/// Fused transport tendency lap(f) - chemo_divergence(f, c, chi) - advect(f, u).
/// `flux` is scratch of the grid's face layout. Pass chi = 0 to skip the drift.
void transport_tendency(const ScalarField& f, const ScalarField& c, double chi, const VectorField& u,
                        VectorField& flux, ScalarField& out);

/// Largest |div v| over cells.
double max_abs_divergence(const VectorField& v);

}  // namespace chemostokes
