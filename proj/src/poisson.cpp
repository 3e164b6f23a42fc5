#include "chemostokes/poisson.hpp"

#include "chemostokes/errors.hpp"
#include "chemostokes/operators.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace chemostokes {

namespace {

// The FFTW planner is not thread-safe; execution with distinct arrays is.
std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

void remove_mean(std::span<double> v)
{
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    const double m = s / static_cast<double>(v.size());
    for (double& x : v) {
        x -= m;
    }
}

}  // namespace

// Cosine transforms diagonalise the Neumann Laplacian along every axis but the
// last; each transverse mode then leaves a tridiagonal system along the last
// axis, solved by a pre-factored Thomas sweep. In 1D only the sweep remains.
struct NeumannPoisson::SpectralPlan {
    double* buffer = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::size_t modes = 1;  // transverse modes per line along the last axis
    int lines = 1;          // cells along the last axis
    double coupling = 0.0;  // 1 / h_last^2
    // Thomas factors per (mode, line position), modes fastest.
    std::vector<double> upper;
    std::vector<double> inverse_pivot;
    double normalisation = 1.0;

    explicit SpectralPlan(const Grid& g)
    {
        const int dim = g.dim();
        const int last = dim - 1;
        const std::size_t count = g.cell_count();
        lines = g.n(last);
        modes = count / static_cast<std::size_t>(lines);
        coupling = 1.0 / (g.h(last) * g.h(last));

        buffer = fftw_alloc_real(count);
        if (dim > 1) {
            // FFTW is row-major with the last index fastest; our x is fastest.
            int dims[2];
            fftw_r2r_kind fwd[2];
            fftw_r2r_kind bwd[2];
            for (int a = 0; a < last; ++a) {
                dims[a] = g.n(last - 1 - a);
                fwd[a] = FFTW_REDFT10;
                bwd[a] = FFTW_REDFT01;
                normalisation *= 2.0 * g.n(a);
            }
            const int dist = static_cast<int>(modes);
            std::lock_guard lock(fftw_planner_mutex());
            forward = fftw_plan_many_r2r(last, dims, lines, buffer, nullptr, 1, dist, buffer, nullptr, 1, dist, fwd,
                                         FFTW_MEASURE);
            backward = fftw_plan_many_r2r(last, dims, lines, buffer, nullptr, 1, dist, buffer, nullptr, 1, dist, bwd,
                                          FFTW_MEASURE);
            if (forward == nullptr || backward == nullptr) {
                throw SolverError("failed to create cosine-transform plans");
            }
        }

        // Eigenvalue of the transverse operator for every mode.
        std::vector<double> transverse(modes, 0.0);
        for (std::size_t m = 0; m < modes; ++m) {
            const Index3 mode = g.unravel(m);
            for (int a = 0; a < last; ++a) {
                const double s = std::sin(std::numbers::pi * mode[a] / (2.0 * g.n(a)));
                transverse[m] -= 4.0 * s * s / (g.h(a) * g.h(a));
            }
        }

        // Line system: coupling (P[j-1] - 2 P[j] + P[j+1]) + transverse P[j] = rhs[j],
        // with mirrored ends. The zero mode is singular; it is pinned by P[0] = 0
        // and the gauge is restored by removing the mean afterwards.
        upper.assign(count, 0.0);
        inverse_pivot.assign(count, 0.0);
        for (std::size_t m = 0; m < modes; ++m) {
            const bool pinned = m == 0;
            double prev_upper = 0.0;
            for (int j = 0; j < lines; ++j) {
                const bool first = j == 0;
                const bool final = j == lines - 1;
                double lower = first ? 0.0 : coupling;
                double diag = transverse[m] - coupling * ((first ? 0 : 1) + (final ? 0 : 1));
                double up = final ? 0.0 : coupling;
                if (pinned && first) {
                    lower = 0.0;
                    diag = 1.0;
                    up = 0.0;
                }
                const double pivot = diag - lower * prev_upper;
                if (!(std::abs(pivot) > 0.0)) {
                    throw SolverError("singular line system in the cosine-transform solver");
                }
                const std::size_t idx = m + modes * static_cast<std::size_t>(j);
                inverse_pivot[idx] = 1.0 / pivot;
                upper[idx] = up / pivot;
                prev_upper = upper[idx];
            }
        }
    }

    void solve_lines()
    {
        // Forward elimination then back substitution, vectorised across modes.
        const double a = coupling;
        for (std::size_t m = 0; m < modes; ++m) {
            buffer[m] *= inverse_pivot[m];
        }
        if (modes > 0) {
            buffer[0] = 0.0;  // pinned zero mode
        }
        for (int j = 1; j < lines; ++j) {
            double* row = buffer + modes * static_cast<std::size_t>(j);
            const double* prev = row - modes;
            const double* ip = inverse_pivot.data() + modes * static_cast<std::size_t>(j);
            for (std::size_t m = 0; m < modes; ++m) {
                row[m] = (row[m] - a * prev[m]) * ip[m];
            }
        }
        for (int j = lines - 2; j >= 0; --j) {
            double* row = buffer + modes * static_cast<std::size_t>(j);
            const double* next = row + modes;
            const double* up = upper.data() + modes * static_cast<std::size_t>(j);
            for (std::size_t m = 0; m < modes; ++m) {
                row[m] -= up[m] * next[m];
            }
        }
    }

    ~SpectralPlan()
    {
        std::lock_guard lock(fftw_planner_mutex());
        if (forward != nullptr) {
            fftw_destroy_plan(forward);
        }
        if (backward != nullptr) {
            fftw_destroy_plan(backward);
        }
        fftw_free(buffer);
    }

    SpectralPlan(const SpectralPlan&) = delete;
    SpectralPlan& operator=(const SpectralPlan&) = delete;
};

NeumannPoisson::NeumannPoisson(const Grid& grid, PoissonSettings settings)
    : grid_(grid), settings_(settings), rhs0_(grid), r_(grid), p_(grid), ap_(grid), grad_scratch_(grid)
{
    if (!(settings_.tolerance > 0.0) || settings_.max_iterations < 1) {
        throw ValidationError("poisson settings: tolerance must be > 0 and max_iterations >= 1");
    }
    if (settings_.method == PoissonMethod::Spectral) {
        spectral_ = std::make_unique<SpectralPlan>(grid);
    }
}

NeumannPoisson::~NeumannPoisson() = default;
NeumannPoisson::NeumannPoisson(NeumannPoisson&&) noexcept = default;
NeumannPoisson& NeumannPoisson::operator=(NeumannPoisson&&) noexcept = default;

void NeumannPoisson::apply_laplacian(const ScalarField& in, ScalarField& out)
{
    gradient(in, grad_scratch_);
    divergence(grad_scratch_, out);
}

PoissonStats NeumannPoisson::solve(const ScalarField& rhs, ScalarField& solution)
{
    if (!(rhs.grid() == grid_)) {
        throw SolverError("poisson: right-hand side lives on a different grid");
    }
    require_finite(rhs, "poisson right-hand side");
    if (!(solution.grid() == grid_)) {
        solution = ScalarField(grid_);
    }

    double sum = 0.0;
    double sum_abs = 0.0;
    for (double v : rhs.values()) {
        sum += v;
        sum_abs += std::abs(v);
    }
    if (sum_abs == 0.0) {
        solution.fill(0.0);
        return {};
    }
    if (std::abs(sum) > 1e-8 * sum_abs) {
        std::ostringstream os;
        os << "poisson: incompatible right-hand side for the Neumann problem (sum = " << sum
           << ", sum |rhs| = " << sum_abs << ")";
        throw SolverError(os.str());
    }

    // Project out the round-off mean so the problem is exactly solvable.
    std::copy(rhs.values().begin(), rhs.values().end(), rhs0_.values().begin());
    remove_mean(rhs0_.values());

    PoissonStats stats;
    if (settings_.method == PoissonMethod::Spectral) {
        solve_spectral(rhs0_, solution);
        stats.iterations = 1;
    }
    else {
        stats = solve_cg(rhs0_, solution);
    }

    apply_laplacian(solution, ap_);
    double res2 = 0.0;
    double rhs2 = 0.0;
    const auto b = rhs0_.values();
    const auto ax = ap_.values();
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double d = b[i] - ax[i];
        res2 += d * d;
        rhs2 += b[i] * b[i];
    }
    stats.relative_residual = rhs2 > 0.0 ? std::sqrt(res2 / rhs2) : 0.0;
    if (!(stats.relative_residual <= settings_.tolerance)) {
        std::ostringstream os;
        os << "poisson: relative residual " << stats.relative_residual << " exceeds tolerance "
           << settings_.tolerance << " after " << stats.iterations << " iterations";
        if (!stats.residual_history.empty()) {
            os << "; residual history:";
            const std::size_t step = std::max<std::size_t>(1, stats.residual_history.size() / 10);
            for (std::size_t i = 0; i < stats.residual_history.size(); i += step) {
                os << ' ' << stats.residual_history[i];
            }
        }
        throw SolverError(os.str());
    }
    return stats;
}

void NeumannPoisson::solve_spectral(const ScalarField& rhs, ScalarField& solution)
{
    SpectralPlan& plan = *spectral_;
    const std::size_t count = grid_.cell_count();
    std::copy(rhs.data(), rhs.data() + count, plan.buffer);
    if (plan.forward != nullptr) {
        fftw_execute(plan.forward);
    }
    plan.solve_lines();
    if (plan.backward != nullptr) {
        fftw_execute(plan.backward);
    }
    const double scale = 1.0 / plan.normalisation;
    double* out = solution.data();
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = plan.buffer[i] * scale;
    }
    remove_mean(solution.values());
}

PoissonStats NeumannPoisson::solve_cg(const ScalarField& rhs, ScalarField& solution)
{
    // CG on -lap, which is symmetric positive definite on zero-mean fields.
    PoissonStats stats;
    auto x = solution.values();
    remove_mean(x);
    auto r = r_.values();
    auto p = p_.values();
    auto ap = ap_.values();

    apply_laplacian(solution, ap_);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = ap[i] - rhs[i];  // residual of -lap x = -rhs
    }
    remove_mean(r);
    std::copy(r.begin(), r.end(), p.begin());
    const double b_norm = std::sqrt(dot(rhs.values(), rhs.values()));
    double rr = dot(r, r);
    // Aim below the acceptance tolerance so the final residual check has slack.
    const double target = 0.1 * settings_.tolerance * b_norm;

    int it = 0;
    while (std::sqrt(rr) > target && it < settings_.max_iterations) {
        apply_laplacian(p_, ap_);
        for (double& v : ap) {
            v = -v;
        }
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) {
            break;
        }
        const double step = rr / pap;
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        remove_mean(r);
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = r[i] + beta * p[i];
        }
        ++it;
        stats.residual_history.push_back(std::sqrt(rr) / b_norm);
    }
    remove_mean(x);
    stats.iterations = it;
    return stats;
}

}  // namespace chemostokes
