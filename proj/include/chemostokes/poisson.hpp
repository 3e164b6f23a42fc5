#pragma once

#include "chemostokes/fields.hpp"

#include <memory>
#include <vector>

namespace chemostokes {

enum class PoissonMethod {
    Spectral,           // cosine-transform diagonalisation (FFTW), direct
    ConjugateGradient,  // matrix-free CG on the zero-mean subspace
};

struct PoissonSettings {
    PoissonMethod method = PoissonMethod::Spectral;
    double tolerance = 1e-10;  // relative residual ||rhs - lap P||_2 / ||rhs||_2
    int max_iterations = 20000;
};

struct PoissonStats {
    int iterations = 0;
    double relative_residual = 0.0;
    std::vector<double> residual_history;  // CG only
};

/// Pure-Neumann Poisson problem lap(P) = rhs on the cell grid, with the
/// same 5/7-point operator as laplacian_neumann and the gauge mean(P) = 0.
///
/// The right-hand side must be compatible: |sum rhs| <= 1e-8 sum |rhs|.
/// The residual is checked after every solve regardless of method.
class NeumannPoisson {
public:
    NeumannPoisson(const Grid& grid, PoissonSettings settings = {});
    ~NeumannPoisson();
    NeumannPoisson(NeumannPoisson&&) noexcept;
    NeumannPoisson& operator=(NeumannPoisson&&) noexcept;
    NeumannPoisson(const NeumannPoisson&) = delete;
    NeumannPoisson& operator=(const NeumannPoisson&) = delete;

    /// Throws SolverError on incompatible data or when tolerance is not met.
    PoissonStats solve(const ScalarField& rhs, ScalarField& solution);

    [[nodiscard]] const PoissonSettings& settings() const { return settings_; }
    [[nodiscard]] const Grid& grid() const { return grid_; }

private:
    struct SpectralPlan;

    void solve_spectral(const ScalarField& rhs, ScalarField& solution);
    PoissonStats solve_cg(const ScalarField& rhs, ScalarField& solution);
    void apply_laplacian(const ScalarField& in, ScalarField& out);

    Grid grid_;
    PoissonSettings settings_;
    std::unique_ptr<SpectralPlan> spectral_;
    ScalarField rhs0_;
    ScalarField r_, p_, ap_;
    VectorField grad_scratch_;
};

}  // namespace chemostokes
