#include "chemostokes/model.hpp"

#include "chemostokes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chemostokes {

double PhysicalParams::chi_max() const { return std::max(chi1, chi2); }
double PhysicalParams::mu_min() const { return std::min(mu1, mu2); }

std::string ValidationReport::to_string() const
{
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i > 0) {
            os << "; ";
        }
        os << violations[i];
    }
    return os.str();
}

namespace {

void require_positive(ValidationReport& r, std::string_view name, double v)
{
    if (!std::isfinite(v) || !(v > 0.0)) {
        r.violations.push_back(std::string(name) + " must be > 0");
    }
}

void require_nonnegative(ValidationReport& r, std::string_view name, double v)
{
    if (!std::isfinite(v) || !(v >= 0.0)) {
        r.violations.push_back(std::string(name) + " must be >= 0");
    }
}

}  // namespace

ValidationReport validate_params(const PhysicalParams& p)
{
    ValidationReport r;
    require_nonnegative(r, "chi1", p.chi1);
    require_nonnegative(r, "chi2", p.chi2);
    require_nonnegative(r, "a1", p.a1);
    require_nonnegative(r, "a2", p.a2);
    require_positive(r, "mu1", p.mu1);
    require_positive(r, "mu2", p.mu2);
    require_positive(r, "alpha", p.alpha);
    require_positive(r, "beta", p.beta);
    require_positive(r, "gamma", p.gamma);
    require_positive(r, "delta", p.delta);
    if (p.kappa != 0.0) {
        r.violations.push_back("kappa must be 0 (only the Stokes fluid equation is supported)");
    }
    switch (p.phi.kind) {
    case PotentialKind::Linear:
        for (double s : p.phi.slope) {
            if (!std::isfinite(s)) {
                r.violations.push_back("phi slope must be finite");
                break;
            }
        }
        break;
    case PotentialKind::Tabulated:
        if (p.phi.table.empty()) {
            r.violations.push_back("tabulated phi must not be empty");
        }
        else if (!std::all_of(p.phi.table.begin(), p.phi.table.end(),
                              [](double v) { return std::isfinite(v); })) {
            r.violations.push_back("tabulated phi must be finite");
        }
        break;
    }
    return r;
}

void require_valid(const PhysicalParams& p)
{
    const auto report = validate_params(p);
    if (!report.valid()) {
        throw ValidationError(report.to_string());
    }
}

std::string_view to_string(Regime r)
{
    switch (r) {
    case Regime::Coexistence:
        return "coexistence";
    case Regime::Exclusion:
        return "exclusion";
    case Regime::Unsupported:
        return "unsupported";
    }
    return "unsupported";
}

RegimeReport classify_regime(const PhysicalParams& p)
{
    RegimeReport out;
    out.chi_over_mu = p.chi_max() / p.mu_min();
    const bool a1_open = p.a1 > 0.0 && p.a1 < 1.0;
    const bool a2_open = p.a2 > 0.0 && p.a2 < 1.0;
    if (a1_open && a2_open) {
        out.tag = Regime::Coexistence;
    }
    else if (p.a1 >= 1.0 && a2_open) {
        out.tag = Regime::Exclusion;
    }
    else {
        out.tag = Regime::Unsupported;
    }
    return out;
}

bool has_steady_state(const PhysicalParams& p)
{
    const bool weak_coexistence = p.a1 >= 0.0 && p.a1 < 1.0 && p.a2 >= 0.0 && p.a2 < 1.0;
    const bool weak_exclusion = p.a1 >= 1.0 && p.a2 >= 0.0 && p.a2 < 1.0;
    return weak_coexistence || weak_exclusion;
}

SteadyState steady_state(const PhysicalParams& p)
{
    SteadyState s;
    if (p.a1 >= 0.0 && p.a1 < 1.0 && p.a2 >= 0.0 && p.a2 < 1.0) {
        const double det = 1.0 - p.a1 * p.a2;
        s.n1_inf = (1.0 - p.a1) / det;
        s.n2_inf = (1.0 - p.a2) / det;
        s.regime = Regime::Coexistence;
        return s;
    }
    if (p.a1 >= 1.0 && p.a2 >= 0.0 && p.a2 < 1.0) {
        s.n1_inf = 0.0;
        s.n2_inf = 1.0;
        s.regime = Regime::Exclusion;
        return s;
    }
    std::ostringstream os;
    os << "no steady state for a1=" << p.a1 << ", a2=" << p.a2
       << ": requires a1, a2 in (0,1) (coexistence) or a1 >= 1 > a2 (exclusion)";
    throw ValidationError(os.str());
}

}  // namespace chemostokes
