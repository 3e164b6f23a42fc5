#include "chemostokes/app.hpp"

#include "chemostokes/errors.hpp"
#include "chemostokes/io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace chemostokes {

namespace {

using nlohmann::json;

json number(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json to_json(const DecayReport& r)
{
    json j;
    j["epsilon_hat"] = number(r.epsilon_hat);
    j["dissipation_below_floor"] = r.dissipation_below_floor;
    j["monotone"] = r.monotone;
    j["first_increase"] = r.first_increase ? json(*r.first_increase) : json(nullptr);
    j["f_integral"] = number(r.f_integral);
    j["energy_at_cutoff"] = number(r.energy_at_cutoff);
    j["transient_cutoff"] = r.transient_cutoff;
    j["integrability_ok"] = r.integrability_ok;
    j["samples"] = r.samples;
    return j;
}

json to_json(const LyapunovAssessment& a)
{
    json j;
    j["regime"] = std::string(to_string(a.regime.tag));
    j["chi_over_mu"] = number(a.regime.chi_over_mu);
    if (!a.unavailable.empty()) {
        j["unavailable"] = a.unavailable;
    }
    if (a.limit) {
        j["steady_state"] = {{"n1", a.limit->n1_inf}, {"n2", a.limit->n2_inf}, {"c", a.limit->c_inf},
                             {"u", a.limit->u_inf}};
        j["energy_case"] = std::string(to_string(a.energy_case));
    }
    if (a.configured) {
        j["configured_weights"] = to_json(*a.configured);
    }
    if (a.search) {
        json s;
        s["found"] = a.search->found;
        s["candidates"] = a.search->candidates;
        s["admissible"] = a.search->admissible;
        if (a.search->found) {
            s["k"] = a.search->coefficients.k;
            s["l"] = a.search->coefficients.l;
            s["report"] = to_json(a.search->report);
        }
        j["coefficient_search"] = s;
    }
    j["c_monotone"] = {{"ok", a.c_monotone.ok},
                       {"first_violation",
                        a.c_monotone.first_violation ? json(*a.c_monotone.first_violation) : json(nullptr)}};
    if (a.u_decay) {
        const auto& u = *a.u_decay;
        j["u_decay"] = {{"passed", u.passed},
                        {"decayed", u.decayed},
                        {"slaved", u.slaved},
                        {"y_final", number(u.y_final)},
                        {"y_max", number(u.y_max)},
                        {"fitted_constant", number(u.fitted_constant)},
                        {"window_mean_dissipation", number(u.window_mean_dissipation)}};
    }
    if (a.n2_floor) {
        j["n2_floor"] = {{"found", a.n2_floor->found},
                         {"floor", number(a.n2_floor->floor)},
                         {"t_star", number(a.n2_floor->t_star)}};
    }
    j["c_tail"] = {{"l2sq_at_cutoff", number(a.c_l2sq_at_cutoff)},
                   {"l2sq_final", number(a.c_l2sq_final)},
                   {"decays", a.c_tail_decays}};
    j["ok"] = a.ok();
    return j;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

}  // namespace

bool LyapunovAssessment::ok() const
{
    return unavailable.empty() && search && search->found && search->report.epsilon_hat > 0.0 &&
           search->report.integrability_ok && c_monotone.ok && u_decay && u_decay->passed && n2_floor &&
           n2_floor->found && c_tail_decays;
}

LyapunovAssessment evaluate_lyapunov(const DiagnosticsSeries& series, const PhysicalParams& p,
                                     const EnergyCoefficients& weights, double cutoff)
{
    LyapunovAssessment a;
    a.regime = classify_regime(p);
    a.c_monotone = check_c_monotone(series);
    if (!has_steady_state(p)) {
        a.unavailable = "no homogeneous steady state for a1 = " + fmt(p.a1) + ", a2 = " + fmt(p.a2);
        return a;
    }
    a.limit = steady_state(p);
    a.energy_case = a.limit->regime == Regime::Exclusion ? EnergyCase::Exclusion : EnergyCase::Coexistence;

    for (const auto& r : series) {
        if (r.t >= cutoff - 1e-12 &&
            !(std::isfinite(r.energy_n1) && std::isfinite(r.energy_n2) && std::isfinite(r.energy_c))) {
            a.unavailable = "energy undefined at t = " + fmt(r.t) + " (a density cell reached zero)";
            return a;
        }
    }

    try {
        EnergyCoefficients w = weights;
        w.kind = a.energy_case;
        a.configured = fit_epsilon(series, w, cutoff);
        a.search = search_coefficients(series, a.energy_case, cutoff);
    }
    catch (const ValidationError& e) {
        a.unavailable = e.what();
        return a;
    }
    a.u_decay = check_u_decay(series, *a.limit, cutoff);
    a.n2_floor = check_n2_floor(series, 0.5 * a.limit->n2_inf);

    std::size_t at_cutoff = series.size() - 1;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].t >= cutoff - 1e-12) {
            at_cutoff = i;
            break;
        }
    }
    a.c_l2sq_at_cutoff = series[at_cutoff].l2_c * series[at_cutoff].l2_c;
    a.c_l2sq_final = series.back().l2_c * series.back().l2_c;
    a.c_tail_decays = a.c_l2sq_final <= a.c_l2sq_at_cutoff * (1.0 + 1e-12);
    return a;
}

std::vector<std::string> describe(const LyapunovAssessment& a)
{
    std::vector<std::string> out;
    out.push_back("regime: " + std::string(to_string(a.regime.tag)) + " (chi/mu = " + fmt(a.regime.chi_over_mu) +
                  ")");
    out.push_back(std::string("c max-norm nonincreasing: ") + (a.c_monotone.ok ? "yes" : "NO") +
                  (a.c_monotone.first_violation
                       ? " (first violation at record " + std::to_string(*a.c_monotone.first_violation) + ")"
                       : ""));
    if (!a.unavailable.empty()) {
        out.push_back("energy checks unavailable: " + a.unavailable);
        return out;
    }
    out.push_back("steady state: n1 = " + fmt(a.limit->n1_inf) + ", n2 = " + fmt(a.limit->n2_inf) + " (" +
                  std::string(to_string(a.energy_case)) + " energy)");
    if (a.configured) {
        out.push_back("configured weights: epsilon_hat = " + fmt(a.configured->epsilon_hat) +
                      ", monotone = " + (a.configured->monotone ? "yes" : "no"));
    }
    if (a.search) {
        if (a.search->found) {
            const auto& r = a.search->report;
            out.push_back("coefficient search: k = " + fmt(a.search->coefficients.k) +
                          ", l = " + fmt(a.search->coefficients.l) + ", epsilon_hat = " + fmt(r.epsilon_hat) +
                          ", " + std::to_string(a.search->admissible) + "/" + std::to_string(a.search->candidates) +
                          " candidates monotone");
            out.push_back("integral of F after cutoff = " + fmt(r.f_integral) + ", E(cutoff) = " +
                          fmt(r.energy_at_cutoff) + ", bound " + (r.integrability_ok ? "holds" : "VIOLATED"));
        }
        else {
            out.push_back("coefficient search: NO candidate weights give a monotone energy");
        }
    }
    if (a.u_decay) {
        out.push_back(std::string("velocity decay: ") + (a.u_decay->passed ? "passed" : "FAILED") +
                      " (|u|^2 final = " + fmt(a.u_decay->y_final) + ", max = " + fmt(a.u_decay->y_max) +
                      ", fitted constant = " + fmt(a.u_decay->fitted_constant) + ")");
    }
    if (a.n2_floor) {
        if (a.n2_floor->found) {
            out.push_back("n2 floor: min n2 >= " + fmt(a.n2_floor->floor) + " for t >= " + fmt(a.n2_floor->t_star));
        }
        else {
            out.push_back("n2 floor: NOT reached (min n2 ends below half its steady value)");
        }
    }
    out.push_back("int c^2: " + fmt(a.c_l2sq_at_cutoff) + " at cutoff, " + fmt(a.c_l2sq_final) + " at end" +
                  (a.c_tail_decays ? "" : " (GREW)"));
    return out;
}

void write_summary(const std::filesystem::path& path, const RunConfig& cfg, const RunResult& result,
                   const LyapunovAssessment& lyapunov)
{
    json j;
    j["status"] = result.status == RunStatus::Completed ? "completed" : "aborted";
    j["message"] = result.message;
    j["steps"] = result.invariants.steps;
    j["t_final"] = result.final_state.t;
    j["end_time"] = cfg.control.end_time;
    j["wall_seconds"] = result.wall_seconds;
    j["seed"] = cfg.seed;
    j["grid"] = {{"dim", cfg.grid.dim}, {"n", cfg.grid.cells}, {"h", cfg.grid.spacing}};
    const auto& inv = result.invariants;
    j["invariants"] = {{"ok", inv.ok()},
                       {"min_n1", number(inv.min_n1)},
                       {"min_n2", number(inv.min_n2)},
                       {"min_c", number(inv.min_c)},
                       {"worst_c_increase", number(inv.worst_c_increase)},
                       {"c_max_violations", inv.c_max_violations},
                       {"worst_divergence_ratio", number(inv.worst_divergence_ratio)},
                       {"divergence_violations", inv.divergence_violations},
                       {"mass_bound_violations", inv.mass_bound_violations},
                       {"sup_density", number(inv.sup_density)},
                       {"sup_n1", number(inv.sup_n1)},
                       {"sup_n2", number(inv.sup_n2)},
                       {"clipped_cells", inv.clipped_cells}};
    j["lyapunov"] = to_json(lyapunov);
    if (!result.series.empty()) {
        j["final_energy"] = number(result.series.back().energy);
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

RunArtifacts run_to_directory(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream* progress)
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "config.resolved");
        if (!out) {
            throw IoError("cannot write into " + dir.string());
        }
        out << to_config_text(cfg);
    }
    const SimulationSetup setup = make_setup(cfg);
    if (cfg.write_snapshots) {
        write_state_snapshots(dir / "snapshots" / "initial", setup.initial);
    }

    RecordCallback on_record;
    if (progress) {
        on_record = [progress](const DiagnosticsRecord& r) {
            *progress << "t = " << std::setw(10) << r.t << "  mass = (" << r.mass_n1 << ", " << r.mass_n2
                      << ")  |c|inf = " << r.linf_c << "  |u|2 = " << r.l2_u << "  E = " << r.energy << '\n';
        };
    }

    RunArtifacts art;
    art.dir = dir;
    art.result = run(setup, on_record);

    if (!art.result.series.empty()) {
        write_timeseries(dir / "timeseries.csv", art.result.series);
        write_energy_parts(dir / "energy.csv", art.result.series);
    }
    if (cfg.write_snapshots) {
        try {
            write_state_snapshots(dir / "snapshots" / "final", art.result.final_state);
        }
        catch (const NonFiniteError& e) {
            art.result.message += std::string(art.result.message.empty() ? "" : "; ") +
                                  "final snapshot skipped: " + e.what();
        }
    }
    art.lyapunov = evaluate_lyapunov(art.result.series, cfg.params, cfg.energy_weights, cfg.transient_cutoff);
    write_summary(dir / "summary.json", cfg, art.result, art.lyapunov);
    return art;
}

CheckReport check_run_dir(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir)) {
        throw IoError(dir.string() + " is not a directory");
    }
    const RunConfig cfg = parse_config(dir / "config.resolved");
    DiagnosticsSeries series = read_timeseries(dir / "timeseries.csv");
    read_energy_parts(dir / "energy.csv", series);
    if (series.empty()) {
        throw IoError((dir / "timeseries.csv").string() + " holds no records");
    }

    CheckReport rep;
    std::ifstream summary(dir / "summary.json");
    if (summary) {
        const json j = json::parse(summary, nullptr, false);
        if (!j.is_discarded() && j.contains("status")) {
            rep.aborted = j["status"] == "aborted";
            rep.status_message = j.value("message", "");
        }
    }
    rep.lyapunov = evaluate_lyapunov(series, cfg.params, cfg.energy_weights, cfg.transient_cutoff);
    rep.lines.push_back("run: " + std::string(rep.aborted ? "ABORTED" : "completed") + ", " +
                        std::to_string(series.size()) + " records to t = " + fmt(series.back().t));
    if (!rep.status_message.empty()) {
        rep.lines.push_back("message: " + rep.status_message);
    }
    for (auto& line : describe(rep.lyapunov)) {
        rep.lines.push_back(std::move(line));
    }
    return rep;
}

}  // namespace chemostokes
