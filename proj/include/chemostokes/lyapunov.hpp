#pragma once

#include "chemostokes/diagnostics.hpp"
#include "chemostokes/model.hpp"
#include "chemostokes/state.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace chemostokes {

enum class EnergyCase { Coexistence, Exclusion };

std::string_view to_string(EnergyCase c);

/// Weights of the Lyapunov functional: k on the species-2 entropy, l on the
/// signal term (l/2) int c^2.
struct EnergyCoefficients {
    double k = 1.0;
    double l = 1.0;
    EnergyCase kind = EnergyCase::Coexistence;
};

/// The three integrals an energy is built from. energy(w) = species1 + w.k * species2 + w.l / 2 * signal.
struct EnergyParts {
    double species1 = 0.0;
    double species2 = 0.0;
    double signal = 0.0;

    [[nodiscard]] double combine(const EnergyCoefficients& w) const
    {
        return species1 + w.k * species2 + 0.5 * w.l * signal;
    }
};

/// Relative entropy s - N - N log(s / N) >= 0 for s, N > 0; vanishes at s = N.
double relative_entropy(double s, double reference);

/// int (n1 - N1 - N1 log(n1/N1)), int (n2 - N2 - N2 log(n2/N2)), int c^2.
/// Throws ValidationError if a density cell is not strictly positive.
EnergyParts energy_parts_coexistence(const SimState& s, double N1, double N2);
/// int n1, int (n2 - 1 - log n2), int c^2. Throws if n2 has a nonpositive cell.
EnergyParts energy_parts_exclusion(const SimState& s);

double energy_coexistence(const SimState& s, const EnergyCoefficients& w, double N1, double N2);
double dissipation_coexistence(const SimState& s, double N1, double N2);
double energy_exclusion(const SimState& s, const EnergyCoefficients& w);
double dissipation_exclusion(const SimState& s);

struct DecayReport {
    double epsilon_hat = 0.0;
    // True when no sample after the cutoff had dissipation above the floor;
    // epsilon_hat is then 0 and carries no information.
    bool dissipation_below_floor = false;
    bool monotone = true;
    std::optional<std::size_t> first_increase;  // record index of the first E increase
    double f_integral = 0.0;                     // trapezoid integral of F over [cutoff, T]
    double energy_at_cutoff = 0.0;
    double transient_cutoff = 1.0;
    // f_integral <= energy_at_cutoff / epsilon_hat * 1.05 (vacuous when epsilon_hat == 0).
    bool integrability_ok = true;
    std::size_t samples = 0;
};

inline constexpr double kDissipationFloor = 1e-14;

/// Fits the largest epsilon with dE/dt <= -epsilon F along the series, using
/// the energy re-assembled from the stored parts with weights w.
/// Needs at least 3 records at t >= cutoff; throws ValidationError otherwise.
DecayReport fit_epsilon(const DiagnosticsSeries& series, const EnergyCoefficients& w, double cutoff = 1.0);

/// Same fit on bare (t, E, F) samples.
DecayReport fit_epsilon(std::span<const double> t, std::span<const double> energy, std::span<const double> dissipation,
                        double cutoff = 1.0);

struct CoefficientSearch {
    bool found = false;
    EnergyCoefficients coefficients;
    DecayReport report;
    int admissible = 0;  // candidates with a monotone energy
    int candidates = 0;
};

/// Log-grid search over k, l in {10^-2, ..., 10^2} (25 points each) for the
/// weights maximising epsilon_hat among those with monotone energy. Ties go
/// to the pair closest to (1, 1) in log distance. found == false when no
/// candidate is monotone.
CoefficientSearch search_coefficients(const DiagnosticsSeries& series, EnergyCase kind, double cutoff = 1.0);

/// The 25 weights tried per axis by search_coefficients.
std::vector<double> coefficient_grid();

struct MonotoneCheck {
    bool ok = true;
    std::optional<std::size_t> first_violation;
};

/// ||c||_inf nonincreasing along the series within 1e-12 absolute slack.
MonotoneCheck check_c_monotone(const DiagnosticsSeries& series);
MonotoneCheck check_c_monotone(std::span<const double> linf_c, double slack = 1e-12);

struct VelocityDecayReport {
    bool passed = true;
    double y_final = 0.0;            // ||u(T)||_2^2
    double y_max = 0.0;              // max_t ||u||_2^2
    double fitted_constant = 0.0;    // max over t >= cutoff of y / F (F above floor)
    double window_mean_dissipation = 0.0;
    bool decayed = true;             // y_final <= 0.1 y_max
    bool slaved = true;              // y_final <= fitted_constant * window mean of F
};

/// Velocity energy y = ||u||_2^2 decays with the density dissipation F.
/// The trailing window is the last 10% of records (at least 3). Fails
/// outright when `limit` is not a coexistence or exclusion steady state.
VelocityDecayReport check_u_decay(const DiagnosticsSeries& series, const SteadyState& limit, double cutoff = 1.0);

struct FloorReport {
    bool found = false;
    double floor = 0.0;   // min of min n2 over records with t >= t_star
    double t_star = 0.0;  // earliest record time after which min n2 >= target
};

/// Earliest T* with min n2 >= target for every record at t >= T*.
FloorReport check_n2_floor(const DiagnosticsSeries& series, double target);

}  // namespace chemostokes
