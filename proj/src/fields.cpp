#include "chemostokes/fields.hpp"

#include "chemostokes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chemostokes {

Grid::Grid(int dim, Index3 cells, Vec3 spacing) : dim_(dim)
{
    if (dim < 1 || dim > 3) {
        throw ValidationError("grid dim must be 1, 2 or 3");
    }
    cells_ = 1;
    cell_volume_ = 1.0;
    for (int a = 0; a < 3; ++a) {
        if (a < dim) {
            if (cells[a] < 3) {
                throw ValidationError("grid needs at least 3 cells per axis (axis " + std::to_string(a) + ")");
            }
            if (!std::isfinite(spacing[a]) || !(spacing[a] > 0.0)) {
                throw ValidationError("grid spacing must be > 0 (axis " + std::to_string(a) + ")");
            }
            n_[a] = cells[a];
            h_[a] = spacing[a];
            cell_volume_ *= spacing[a];
        }
        else {
            n_[a] = 1;
            h_[a] = 1.0;
        }
        cells_ *= static_cast<std::size_t>(n_[a]);
    }
}

Grid Grid::box(int dim, Index3 cells, Vec3 lengths)
{
    Vec3 h{1.0, 1.0, 1.0};
    for (int a = 0; a < dim && a < 3; ++a) {
        h[a] = lengths[a] / std::max(cells[a], 1);
    }
    return Grid(dim, cells, h);
}

double Grid::min_spacing() const
{
    double m = h_[0];
    for (int a = 1; a < dim_; ++a) {
        m = std::min(m, h_[a]);
    }
    return m;
}

Index3 Grid::unravel(std::size_t idx) const
{
    const auto nx = static_cast<std::size_t>(n_[0]);
    const auto ny = static_cast<std::size_t>(n_[1]);
    return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny), static_cast<int>(idx / (nx * ny))};
}

std::size_t Grid::stride(int axis) const
{
    switch (axis) {
    case 0:
        return 1;
    case 1:
        return static_cast<std::size_t>(n_[0]);
    default:
        return static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]);
    }
}

Vec3 Grid::center(int i, int j, int k) const
{
    return {(i + 0.5) * h_[0], (j + 0.5) * h_[1], (k + 0.5) * h_[2]};
}

Index3 Grid::face_extents(int axis) const
{
    Index3 e = n_;
    e[axis] += 1;
    return e;
}

std::size_t Grid::face_count(int axis) const
{
    const auto e = face_extents(axis);
    return static_cast<std::size_t>(e[0]) * static_cast<std::size_t>(e[1]) * static_cast<std::size_t>(e[2]);
}

std::size_t Grid::face_index(int axis, int i, int j, int k) const
{
    const auto e = face_extents(axis);
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(e[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(e[1]) * static_cast<std::size_t>(k));
}

ScalarField::ScalarField(const Grid& grid, double value) : grid_(grid), values_(grid.cell_count(), value) {}

void ScalarField::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

VectorField::VectorField(const Grid& grid) : grid_(grid)
{
    for (int a = 0; a < grid.dim(); ++a) {
        comps_[a].assign(grid.face_count(a), 0.0);
    }
}

void VectorField::fill(double v)
{
    for (auto& c : comps_) {
        std::fill(c.begin(), c.end(), v);
    }
}

void VectorField::enforce_no_slip()
{
    for (int a = 0; a < grid_.dim(); ++a) {
        const auto e = grid_.face_extents(a);
        for (int k = 0; k < e[2]; ++k) {
            for (int j = 0; j < e[1]; ++j) {
                for (int i = 0; i < e[0]; ++i) {
                    const Index3 ijk{i, j, k};
                    if (ijk[a] == 0 || ijk[a] == e[a] - 1) {
                        comps_[a][grid_.face_index(a, i, j, k)] = 0.0;
                    }
                }
            }
        }
    }
}

void require_finite(const ScalarField& f, const char* what)
{
    const auto v = f.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            const auto c = f.grid().unravel(i);
            std::ostringstream os;
            os << what << ": non-finite value " << v[i] << " at cell (" << c[0] << ", " << c[1] << ", " << c[2]
               << ")";
            throw NonFiniteError(os.str());
        }
    }
}

void require_finite(const VectorField& v, const char* what)
{
    const auto& g = v.grid();
    for (int a = 0; a < g.dim(); ++a) {
        const auto comp = v.component(a);
        const auto e = g.face_extents(a);
        for (std::size_t i = 0; i < comp.size(); ++i) {
            if (!std::isfinite(comp[i])) {
                const auto ex = static_cast<std::size_t>(e[0]);
                const auto ey = static_cast<std::size_t>(e[1]);
                std::ostringstream os;
                os << what << ": non-finite value on axis-" << a << " face (" << i % ex << ", " << (i / ex) % ey
                   << ", " << i / (ex * ey) << ")";
                throw NonFiniteError(os.str());
            }
        }
    }
}

double integrate(const ScalarField& f)
{
    require_finite(f);
    double sum = 0.0;
    for (double v : f.values()) {
        sum += v;
    }
    return sum * f.grid().cell_volume();
}

double norm(const ScalarField& f, NormKind kind)
{
    require_finite(f);
    const auto v = f.values();
    switch (kind) {
    case NormKind::L1: {
        double s = 0.0;
        for (double x : v) {
            s += std::abs(x);
        }
        return s * f.grid().cell_volume();
    }
    case NormKind::L2: {
        double s = 0.0;
        for (double x : v) {
            s += x * x;
        }
        return std::sqrt(s * f.grid().cell_volume());
    }
    case NormKind::Inf: {
        double m = 0.0;
        for (double x : v) {
            m = std::max(m, std::abs(x));
        }
        return m;
    }
    }
    return 0.0;
}

double norm(const VectorField& u, NormKind kind)
{
    require_finite(u);
    const auto& g = u.grid();
    double acc = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        for (double x : u.component(a)) {
            switch (kind) {
            case NormKind::L1:
                acc += std::abs(x);
                break;
            case NormKind::L2:
                acc += x * x;
                break;
            case NormKind::Inf:
                acc = std::max(acc, std::abs(x));
                break;
            }
        }
    }
    switch (kind) {
    case NormKind::L1:
        return acc * g.cell_volume();
    case NormKind::L2:
        return std::sqrt(acc * g.cell_volume());
    case NormKind::Inf:
        return acc;
    }
    return acc;
}

ScalarField init_from_function(const Grid& grid, const std::function<double(const Vec3&)>& fn, InitialTag tag)
{
    ScalarField f(grid);
    const auto& n = grid.extents();
    for (int k = 0; k < n[2]; ++k) {
        for (int j = 0; j < n[1]; ++j) {
            for (int i = 0; i < n[0]; ++i) {
                const double v = fn(grid.center(i, j, k));
                if (!std::isfinite(v)) {
                    std::ostringstream os;
                    os << "initial function is not finite at cell (" << i << ", " << j << ", " << k << ")";
                    throw NonFiniteError(os.str());
                }
                if (tag == InitialTag::PositiveInitial && !(v > 0.0)) {
                    std::ostringstream os;
                    os << "initial data must be strictly positive; sample " << v << " at cell (" << i << ", " << j
                       << ", " << k << ")";
                    throw ValidationError(os.str());
                }
                f(i, j, k) = v;
            }
        }
    }
    return f;
}

}  // namespace chemostokes
