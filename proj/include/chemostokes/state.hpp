#pragma once

#include "chemostokes/fields.hpp"

#include <cstdint>

namespace chemostokes {

/// (n1, n2, c, u, P) at one time level.
struct SimState {
    double t = 0.0;
    std::int64_t step = 0;
    ScalarField n1;
    ScalarField n2;
    ScalarField c;
    VectorField u;
    ScalarField pressure;

    [[nodiscard]] const Grid& grid() const { return n1.grid(); }
};

/// State with u = 0 and P = 0. All three scalars must share one grid.
SimState make_state(ScalarField n1, ScalarField n2, ScalarField c);

}  // namespace chemostokes
