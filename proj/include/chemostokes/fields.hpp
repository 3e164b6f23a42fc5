#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace chemostokes {

using Vec3 = std::array<double, 3>;
using Index3 = std::array<int, 3>;

/// Uniform rectangular box [0, L0] x [0, L1] x [0, L2] with L = n * h.
///
/// Scalars live at cell centres, velocity components on the faces normal to
/// their axis (MAC staggering). Axes beyond dim() are inert: n = 1, h = 1.
class Grid {
public:
    Grid() = default;
    Grid(int dim, Index3 cells, Vec3 spacing);

    static Grid box(int dim, Index3 cells, Vec3 lengths);

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] int n(int axis) const { return n_[axis]; }
    [[nodiscard]] double h(int axis) const { return h_[axis]; }
    [[nodiscard]] double length(int axis) const { return n_[axis] * h_[axis]; }
    [[nodiscard]] const Index3& extents() const { return n_; }
    [[nodiscard]] const Vec3& spacing() const { return h_; }
    [[nodiscard]] double min_spacing() const;

    [[nodiscard]] std::size_t cell_count() const { return cells_; }
    [[nodiscard]] double cell_volume() const { return cell_volume_; }
    [[nodiscard]] double volume() const { return cell_volume_ * static_cast<double>(cells_); }

    [[nodiscard]] std::size_t index(int i, int j, int k) const
    {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(n_[0]) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(n_[1]) * static_cast<std::size_t>(k));
    }
    [[nodiscard]] Index3 unravel(std::size_t idx) const;
    [[nodiscard]] std::size_t stride(int axis) const;
    [[nodiscard]] Vec3 center(int i, int j, int k) const;

    /// Extents of the face array holding the velocity component along `axis`.
    [[nodiscard]] Index3 face_extents(int axis) const;
    [[nodiscard]] std::size_t face_count(int axis) const;
    [[nodiscard]] std::size_t face_index(int axis, int i, int j, int k) const;

    friend bool operator==(const Grid& a, const Grid& b)
    {
        return a.dim_ == b.dim_ && a.n_ == b.n_ && a.h_ == b.h_;
    }

private:
    int dim_ = 0;
    Index3 n_{1, 1, 1};
    Vec3 h_{1.0, 1.0, 1.0};
    std::size_t cells_ = 0;
    double cell_volume_ = 0.0;
};

/// One real value per cell, x-fastest.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& grid, double value = 0.0);

    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    [[nodiscard]] double& operator[](std::size_t i) { return values_[i]; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] double& operator()(int i, int j = 0, int k = 0) { return values_[grid_.index(i, j, k)]; }
    [[nodiscard]] double operator()(int i, int j = 0, int k = 0) const { return values_[grid_.index(i, j, k)]; }

    [[nodiscard]] std::span<double> values() { return values_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] double* data() { return values_.data(); }
    [[nodiscard]] const double* data() const { return values_.data(); }

    void fill(double v);

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Face-centred vector field: component a sits on faces normal to axis a.
/// For a velocity, the boundary faces hold the no-slip value 0.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const Grid& grid);

    [[nodiscard]] const Grid& grid() const { return grid_; }

    [[nodiscard]] std::span<double> component(int axis) { return comps_[axis]; }
    [[nodiscard]] std::span<const double> component(int axis) const { return comps_[axis]; }
    [[nodiscard]] double& at(int axis, int i, int j = 0, int k = 0)
    {
        return comps_[axis][grid_.face_index(axis, i, j, k)];
    }
    [[nodiscard]] double at(int axis, int i, int j = 0, int k = 0) const
    {
        return comps_[axis][grid_.face_index(axis, i, j, k)];
    }

    void fill(double v);
    /// Zeroes the normal component on boundary faces.
    void enforce_no_slip();

private:
    Grid grid_;
    std::array<std::vector<double>, 3> comps_;
};

enum class NormKind { L1, L2, Inf };

/// Midpoint quadrature: sum of cell values times cell volume.
/// Throws NonFiniteError naming the first offending cell.
double integrate(const ScalarField& f);

/// Discrete L1/L2 with the cell-volume weight; Inf is the largest magnitude.
double norm(const ScalarField& f, NormKind kind);

/// Face-weighted norms of a staggered field: each face carries the cell volume.
double norm(const VectorField& v, NormKind kind);

/// Throws NonFiniteError naming the first non-finite cell.
void require_finite(const ScalarField& f, const char* what = "field");
void require_finite(const VectorField& v, const char* what = "field");

enum class InitialTag { Plain, PositiveInitial };

/// Samples fn at cell centres. PositiveInitial rejects any sample <= 0
/// (initial densities must be strictly positive) with ValidationError.
ScalarField init_from_function(const Grid& grid, const std::function<double(const Vec3&)>& fn,
                               InitialTag tag = InitialTag::Plain);

}  // namespace chemostokes
