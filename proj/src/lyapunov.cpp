#include "chemostokes/lyapunov.hpp"

#include "chemostokes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace chemostokes {

std::string_view to_string(EnergyCase c)
{
    return c == EnergyCase::Coexistence ? "coexistence" : "exclusion";
}

double relative_entropy(double s, double reference)
{
    const double d = (s - reference) / reference;
    if (std::abs(d) < 1e-4) {
        // d - log1p(d) loses digits near d = 0; use the series instead.
        const double d2 = d * d;
        return reference * d2 * (0.5 - d / 3.0 + d2 / 4.0 - d2 * d / 5.0);
    }
    return reference * (d - std::log1p(d));
}

namespace {

void require_positive_cells(const ScalarField& f, const char* name)
{
    const auto v = f.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0)) {
            const auto c = f.grid().unravel(i);
            std::ostringstream os;
            os << "energy needs " << name << " > 0 cellwise; cell (" << c[0] << ", " << c[1] << ", " << c[2]
               << ") holds " << v[i];
            throw ValidationError(os.str());
        }
    }
}

double integral_of_square(const ScalarField& f)
{
    double s = 0.0;
    for (double x : f.values()) {
        s += x * x;
    }
    return s * f.grid().cell_volume();
}

double integral_of_square_deviation(const ScalarField& f, double ref)
{
    double s = 0.0;
    for (double x : f.values()) {
        const double d = x - ref;
        s += d * d;
    }
    return s * f.grid().cell_volume();
}

double entropy_integral(const ScalarField& f, double ref)
{
    double s = 0.0;
    for (double x : f.values()) {
        s += relative_entropy(x, ref);
    }
    return s * f.grid().cell_volume();
}

}  // namespace

EnergyParts energy_parts_coexistence(const SimState& s, double N1, double N2)
{
    if (!(N1 > 0.0) || !(N2 > 0.0)) {
        throw ValidationError("coexistence energy needs N1, N2 > 0");
    }
    require_positive_cells(s.n1, "n1");
    require_positive_cells(s.n2, "n2");
    return {entropy_integral(s.n1, N1), entropy_integral(s.n2, N2), integral_of_square(s.c)};
}

EnergyParts energy_parts_exclusion(const SimState& s)
{
    require_positive_cells(s.n2, "n2");
    double mass = 0.0;
    for (double x : s.n1.values()) {
        mass += x;
    }
    return {mass * s.grid().cell_volume(), entropy_integral(s.n2, 1.0), integral_of_square(s.c)};
}

double energy_coexistence(const SimState& s, const EnergyCoefficients& w, double N1, double N2)
{
    return energy_parts_coexistence(s, N1, N2).combine(w);
}

double dissipation_coexistence(const SimState& s, double N1, double N2)
{
    return integral_of_square_deviation(s.n1, N1) + integral_of_square_deviation(s.n2, N2);
}

double energy_exclusion(const SimState& s, const EnergyCoefficients& w)
{
    return energy_parts_exclusion(s).combine(w);
}

double dissipation_exclusion(const SimState& s)
{
    return integral_of_square(s.n1) + integral_of_square_deviation(s.n2, 1.0);
}

DecayReport fit_epsilon(std::span<const double> t, std::span<const double> energy, std::span<const double> dissipation,
                        double cutoff)
{
    if (t.size() != energy.size() || t.size() != dissipation.size()) {
        throw ValidationError("fit_epsilon: sample arrays differ in length");
    }
    DecayReport rep;
    rep.transient_cutoff = cutoff;
    const std::size_t first =
        static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), cutoff - 1e-12) - t.begin());
    const std::size_t count = t.size() - first;
    if (count < 3) {
        std::ostringstream os;
        os << "fit_epsilon: need at least 3 samples at t >= " << cutoff << ", have " << count;
        throw ValidationError(os.str());
    }
    rep.samples = count;
    rep.energy_at_cutoff = energy[first];

    double scale = 0.0;
    for (std::size_t i = first; i < t.size(); ++i) {
        scale = std::max(scale, std::abs(energy[i]));
    }
    const double slack = 1e-12 * scale;
    for (std::size_t i = first; i + 1 < t.size(); ++i) {
        if (energy[i + 1] > energy[i] + slack) {
            rep.monotone = false;
            rep.first_increase = i + 1;
            break;
        }
    }

    double eps = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = first + 1; i + 1 < t.size(); ++i) {
        if (!(dissipation[i] > kDissipationFloor)) {
            continue;
        }
        const double rate = (energy[i + 1] - energy[i - 1]) / (t[i + 1] - t[i - 1]);
        eps = std::min(eps, -rate / dissipation[i]);
        any = true;
    }
    if (any) {
        rep.epsilon_hat = std::max(0.0, eps);
    }
    else {
        rep.dissipation_below_floor = true;
        rep.epsilon_hat = 0.0;
    }

    for (std::size_t i = first; i + 1 < t.size(); ++i) {
        rep.f_integral += 0.5 * (dissipation[i] + dissipation[i + 1]) * (t[i + 1] - t[i]);
    }
    if (rep.epsilon_hat > 0.0) {
        rep.integrability_ok = rep.f_integral <= rep.energy_at_cutoff / rep.epsilon_hat * 1.05;
    }
    return rep;
}

DecayReport fit_epsilon(const DiagnosticsSeries& series, const EnergyCoefficients& w, double cutoff)
{
    std::vector<double> t(series.size());
    std::vector<double> e(series.size());
    std::vector<double> f(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& r = series[i];
        t[i] = r.t;
        e[i] = EnergyParts{r.energy_n1, r.energy_n2, r.energy_c}.combine(w);
        f[i] = r.dissipation;
    }
    return fit_epsilon(t, e, f, cutoff);
}

std::vector<double> coefficient_grid()
{
    std::vector<double> g(25);
    for (int i = 0; i < 25; ++i) {
        g[static_cast<std::size_t>(i)] = std::pow(10.0, -2.0 + 4.0 * i / 24.0);
    }
    return g;
}

CoefficientSearch search_coefficients(const DiagnosticsSeries& series, EnergyCase kind, double cutoff)
{
    CoefficientSearch out;
    const auto grid = coefficient_grid();
    double best_distance = std::numeric_limits<double>::infinity();
    for (double k : grid) {
        for (double l : grid) {
            ++out.candidates;
            const EnergyCoefficients w{k, l, kind};
            const DecayReport rep = fit_epsilon(series, w, cutoff);
            if (!rep.monotone) {
                continue;
            }
            ++out.admissible;
            const double distance = std::hypot(std::log10(k), std::log10(l));
            const double tie = 1e-12 * std::max(rep.epsilon_hat, out.report.epsilon_hat);
            bool better = false;
            if (!out.found || rep.epsilon_hat > out.report.epsilon_hat + tie) {
                better = true;
            }
            else if (std::abs(rep.epsilon_hat - out.report.epsilon_hat) <= tie && distance < best_distance) {
                better = true;
            }
            if (better) {
                out.found = true;
                out.coefficients = w;
                out.report = rep;
                best_distance = distance;
            }
        }
    }
    return out;
}

MonotoneCheck check_c_monotone(std::span<const double> linf_c, double slack)
{
    MonotoneCheck out;
    for (std::size_t i = 1; i < linf_c.size(); ++i) {
        if (linf_c[i] > linf_c[i - 1] + slack) {
            out.ok = false;
            out.first_violation = i;
            break;
        }
    }
    return out;
}

MonotoneCheck check_c_monotone(const DiagnosticsSeries& series)
{
    std::vector<double> v(series.size());
    std::transform(series.begin(), series.end(), v.begin(), [](const DiagnosticsRecord& r) { return r.linf_c; });
    return check_c_monotone(v);
}

VelocityDecayReport check_u_decay(const DiagnosticsSeries& series, const SteadyState& limit, double cutoff)
{
    VelocityDecayReport rep;
    if (limit.regime == Regime::Unsupported) {
        // The dissipation column is undefined without a steady state.
        rep.passed = rep.decayed = rep.slaved = false;
        return rep;
    }
    if (series.empty()) {
        return rep;
    }
    for (const auto& r : series) {
        rep.y_max = std::max(rep.y_max, r.l2_u * r.l2_u);
    }
    rep.y_final = series.back().l2_u * series.back().l2_u;
    rep.decayed = rep.y_final <= 0.1 * rep.y_max;

    for (const auto& r : series) {
        if (r.t >= cutoff - 1e-12 && r.dissipation > kDissipationFloor) {
            rep.fitted_constant = std::max(rep.fitted_constant, r.l2_u * r.l2_u / r.dissipation);
        }
    }
    const std::size_t window = std::max<std::size_t>(3, series.size() / 10);
    const std::size_t start = series.size() > window ? series.size() - window : 0;
    double sum = 0.0;
    for (std::size_t i = start; i < series.size(); ++i) {
        sum += series[i].dissipation;
    }
    rep.window_mean_dissipation = sum / static_cast<double>(series.size() - start);
    rep.slaved = rep.y_final <= rep.fitted_constant * rep.window_mean_dissipation;
    rep.passed = rep.decayed && rep.slaved;
    return rep;
}

FloorReport check_n2_floor(const DiagnosticsSeries& series, double target)
{
    FloorReport rep;
    if (series.empty()) {
        return rep;
    }
    // Walk backwards to the last record below target; T* is the next record.
    std::size_t start = series.size();
    while (start > 0 && series[start - 1].min_n2 >= target) {
        --start;
    }
    if (start == series.size()) {
        return rep;
    }
    rep.found = true;
    rep.t_star = series[start].t;
    rep.floor = std::numeric_limits<double>::infinity();
    for (std::size_t i = start; i < series.size(); ++i) {
        rep.floor = std::min(rep.floor, series[i].min_n2);
    }
    return rep;
}

}  // namespace chemostokes
