#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace chemostokes {

enum class PotentialKind { Linear, Tabulated };

/// Gravitational potential driving the buoyancy force.
///
/// Linear: phi(x) = slope . x, evaluated at cell centres.
/// Tabulated: one value per cell in x-fastest order; the grid it belongs to
/// is checked when the potential is sampled.
struct Potential {
    PotentialKind kind = PotentialKind::Linear;
    std::array<double, 3> slope{0.0, 0.0, 0.0};
    std::vector<double> table;
};

struct PhysicalParams {
    double chi1 = 0.0;
    double chi2 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double mu1 = 1.0;
    double mu2 = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double delta = 1.0;
    // Convective switch of the fluid equation; only the Stokes case (0) is supported.
    double kappa = 0.0;
    Potential phi;

    [[nodiscard]] double chi_max() const;
    [[nodiscard]] double mu_min() const;
};

struct ValidationReport {
    std::vector<std::string> violations;

    [[nodiscard]] bool valid() const { return violations.empty(); }
    [[nodiscard]] std::string to_string() const;
};

/// Lists every violated sign condition. Never throws.
ValidationReport validate_params(const PhysicalParams& p);

/// Throws ValidationError carrying the full report if p is invalid.
void require_valid(const PhysicalParams& p);

enum class Regime { Coexistence, Exclusion, Unsupported };

std::string_view to_string(Regime r);

struct RegimeReport {
    Regime tag = Regime::Unsupported;
    // max(chi1, chi2) / min(mu1, mu2). Reported raw: no threshold is known.
    double chi_over_mu = 0.0;
};

/// Coexistence iff a1, a2 in (0,1); Exclusion iff a1 >= 1 > a2 > 0.
RegimeReport classify_regime(const PhysicalParams& p);

/// Spatially homogeneous limit (n1, n2, c, u) of the competition dynamics.
struct SteadyState {
    double n1_inf = 0.0;
    double n2_inf = 0.0;
    double c_inf = 0.0;
    double u_inf = 0.0;
    Regime regime = Regime::Unsupported;
};

/// Coexistence formula for a1, a2 in [0,1); (0, 1) for a1 >= 1 > a2 >= 0.
/// Throws ValidationError naming the failed case condition otherwise.
SteadyState steady_state(const PhysicalParams& p);

/// True when steady_state(p) would succeed.
bool has_steady_state(const PhysicalParams& p);

}  // namespace chemostokes
