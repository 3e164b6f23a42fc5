#include "chemostokes/operators.hpp"

#include "chemostokes/detail/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace chemostokes {

using detail::face_stride;
using detail::for_each_cell_with_face;
using detail::for_each_interior_face;

void gradient(const ScalarField& f, VectorField& out)
{
    const Grid& g = f.grid();
    const double* fv = f.data();
    for (int a = 0; a < g.dim(); ++a) {
        auto comp = out.component(a);
        std::fill(comp.begin(), comp.end(), 0.0);
        double* o = comp.data();
        const double inv_h = 1.0 / g.h(a);
        for_each_interior_face(g, a, [&](std::size_t face, std::size_t l, std::size_t r) {
            o[face] = (fv[r] - fv[l]) * inv_h;
        });
    }
}

VectorField gradient(const ScalarField& f)
{
    VectorField out(f.grid());
    gradient(f, out);
    return out;
}

void divergence(const VectorField& v, ScalarField& out)
{
    const Grid& g = v.grid();
    double* o = out.data();
    std::fill(o, o + out.size(), 0.0);
    for (int a = 0; a < g.dim(); ++a) {
        const double* c = v.component(a).data();
        const std::size_t fs = face_stride(g, a);
        const double inv_h = 1.0 / g.h(a);
        for_each_cell_with_face(g, a, [&](std::size_t cell, std::size_t face) {
            o[cell] += (c[face + fs] - c[face]) * inv_h;
        });
    }
}

ScalarField divergence(const VectorField& v)
{
    ScalarField out(v.grid());
    divergence(v, out);
    return out;
}

void laplacian_neumann(const ScalarField& f, ScalarField& out)
{
    VectorField grad(f.grid());
    gradient(f, grad);
    divergence(grad, out);
}

ScalarField laplacian_neumann(const ScalarField& f)
{
    ScalarField out(f.grid());
    laplacian_neumann(f, out);
    return out;
}

double max_abs_divergence(const VectorField& v)
{
    const ScalarField d = divergence(v);
    double m = 0.0;
    for (double x : d.values()) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

void advect(const ScalarField& f, const VectorField& u, ScalarField& out)
{
    const Grid& g = f.grid();
    VectorField flux(g);
    const double* fv = f.data();
    for (int a = 0; a < g.dim(); ++a) {
        const double* uc = u.component(a).data();
        double* fl = flux.component(a).data();
        for_each_interior_face(g, a, [&](std::size_t face, std::size_t l, std::size_t r) {
            const double w = uc[face];
            fl[face] = w * (w > 0.0 ? fv[l] : fv[r]);
        });
    }
    divergence(flux, out);

    const double umax = norm(u, NormKind::Inf);
    if (umax > 0.0) {
        const double div = max_abs_divergence(u);
        if (div > 1e-10 * umax / g.min_spacing()) {
            std::cerr << "warning: advect: velocity is not discretely divergence-free (max |div u| = " << div
                      << ")\n";
        }
    }
}

ScalarField advect(const ScalarField& f, const VectorField& u)
{
    ScalarField out(f.grid());
    advect(f, u, out);
    return out;
}

void chemo_divergence(const ScalarField& n, const ScalarField& c, double chi, ScalarField& out)
{
    const Grid& g = n.grid();
    VectorField flux(g);
    const double* nv = n.data();
    const double* cv = c.data();
    for (int a = 0; a < g.dim(); ++a) {
        double* fl = flux.component(a).data();
        const double inv_h = 1.0 / g.h(a);
        for_each_interior_face(g, a, [&](std::size_t face, std::size_t l, std::size_t r) {
            const double grad = (cv[r] - cv[l]) * inv_h;
            fl[face] = chi * grad * (grad > 0.0 ? nv[l] : nv[r]);
        });
    }
    divergence(flux, out);
}

ScalarField chemo_divergence(const ScalarField& n, const ScalarField& c, double chi)
{
    ScalarField out(n.grid());
    chemo_divergence(n, c, chi, out);
    return out;
}

void transport_tendency(const ScalarField& f, const ScalarField& c, double chi, const VectorField& u,
                        VectorField& flux, ScalarField& out)
{
    const Grid& g = f.grid();
    const double* fv = f.data();
    const double* cv = c.data();
    // flux = -grad f + chi f_donor grad c + u f_upwind; tendency = -div(flux).
    for (int a = 0; a < g.dim(); ++a) {
        const double* uc = u.component(a).data();
        double* fl = flux.component(a).data();
        const double inv_h = 1.0 / g.h(a);
        if (chi != 0.0) {
            for_each_interior_face(g, a, [&](std::size_t face, std::size_t l, std::size_t r) {
                const double grad_c = (cv[r] - cv[l]) * inv_h;
                const double w = uc[face];
                fl[face] = -(fv[r] - fv[l]) * inv_h + chi * grad_c * (grad_c > 0.0 ? fv[l] : fv[r]) +
                           w * (w > 0.0 ? fv[l] : fv[r]);
            });
        }
        else {
            for_each_interior_face(g, a, [&](std::size_t face, std::size_t l, std::size_t r) {
                const double w = uc[face];
                fl[face] = -(fv[r] - fv[l]) * inv_h + w * (w > 0.0 ? fv[l] : fv[r]);
            });
        }
    }
    double* o = out.data();
    std::fill(o, o + out.size(), 0.0);
    for (int a = 0; a < g.dim(); ++a) {
        const double* fl = flux.component(a).data();
        const std::size_t fs = face_stride(g, a);
        const double inv_h = 1.0 / g.h(a);
        for_each_cell_with_face(g, a, [&](std::size_t cell, std::size_t face) {
            o[cell] -= (fl[face + fs] - fl[face]) * inv_h;
        });
    }
}

}  // namespace chemostokes
