#include "chemostokes/sweep.hpp"

#include "chemostokes/app.hpp"
#include "chemostokes/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace chemostokes {

namespace {

std::string directory_name(double chi)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "chi_%.6g", chi);
    return buf;
}

std::string csv_escape(const std::string& s)
{
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') {
            out += '"';
        }
        out += ch == '\n' ? ' ' : ch;
    }
    return out + "\"";
}

}  // namespace

SweepSummary run_sweep(const RunConfig& base, const std::vector<double>& chi_values,
                       const std::filesystem::path& out_dir, unsigned workers)
{
    if (chi_values.empty()) {
        throw ValidationError("sweep: the chi list is empty");
    }
    for (double chi : chi_values) {
        if (!(chi > 0.0) || !std::isfinite(chi)) {
            throw ValidationError("sweep: chi values must be positive and finite");
        }
    }

    SweepSummary summary;
    summary.rows.resize(chi_values.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < chi_values.size(); i = next++) {
            SweepRow& row = summary.rows[i];
            row.chi = chi_values[i];
            row.dir = out_dir / directory_name(row.chi);
            RunConfig cfg = base;
            cfg.params.chi1 = cfg.params.chi2 = row.chi;
            cfg.output_dir = row.dir;
            row.chi_over_mu = row.chi / cfg.params.mu_min();
            try {
                const RunArtifacts art = run_to_directory(cfg, row.dir);
                row.completed = art.result.status == RunStatus::Completed;
                row.sup_density = art.result.invariants.sup_density;
                row.invariants = art.result.invariants;
                row.final_energy = art.result.series.empty() ? std::nan("") : art.result.series.back().energy;
                row.message = art.result.message;
            }
            catch (const std::exception& e) {
                row.completed = false;
                row.sup_density = std::nan("");
                row.final_energy = std::nan("");
                row.message = e.what();
            }
        }
    };

    if (workers == 0) {
        workers = std::max(1U, std::thread::hardware_concurrency());
    }
    workers = std::min<unsigned>(workers, static_cast<unsigned>(chi_values.size()));
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    worker();
    pool.clear();

    write_sweep_summary(out_dir / "sweep_summary.csv", summary);
    return summary;
}

void write_sweep_summary(const std::filesystem::path& path, const SweepSummary& summary)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << "chi,chi_over_mu,sup_density,status,final_energy,dir,message\n";
    char buf[256];
    for (const auto& r : summary.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s,%.17g,", r.chi, r.chi_over_mu, r.sup_density,
                      r.completed ? "completed" : "aborted", r.final_energy);
        out << buf << r.dir.filename().string() << ',' << csv_escape(r.message) << '\n';
    }
}

}  // namespace chemostokes
