#pragma once

#include "chemostokes/fields.hpp"

namespace chemostokes::detail {

/// Calls f(face, left_cell, right_cell) for every interior face normal to
/// `axis`, x-fastest. Boundary faces are skipped.
template <class F>
inline void for_each_interior_face(const Grid& g, int axis, F&& f)
{
    const auto& n = g.extents();
    const std::size_t s = g.stride(axis);
    Index3 lo{0, 0, 0};
    lo[axis] = 1;
    for (int k = lo[2]; k < n[2]; ++k) {
        for (int j = lo[1]; j < n[1]; ++j) {
            std::size_t face = g.face_index(axis, lo[0], j, k);
            std::size_t right = g.index(lo[0], j, k);
            for (int i = lo[0]; i < n[0]; ++i, ++face, ++right) {
                f(face, right - s, right);
            }
        }
    }
}

/// Offset between the left and right face of a cell in the axis-`axis` face array.
inline std::size_t face_stride(const Grid& g, int axis)
{
    const auto e = g.face_extents(axis);
    switch (axis) {
    case 0:
        return 1;
    case 1:
        return static_cast<std::size_t>(e[0]);
    default:
        return static_cast<std::size_t>(e[0]) * static_cast<std::size_t>(e[1]);
    }
}

/// Calls f(cell, left_face) for every cell; the right face is left_face + face_stride.
template <class F>
inline void for_each_cell_with_face(const Grid& g, int axis, F&& f)
{
    const auto& n = g.extents();
    for (int k = 0; k < n[2]; ++k) {
        for (int j = 0; j < n[1]; ++j) {
            std::size_t face = g.face_index(axis, 0, j, k);
            std::size_t cell = g.index(0, j, k);
            for (int i = 0; i < n[0]; ++i, ++face, ++cell) {
                f(cell, face);
            }
        }
    }
}

}  // namespace chemostokes::detail
