#include "chemostokes/config.hpp"

#include "chemostokes/errors.hpp"
#include "chemostokes/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <vector>

namespace chemostokes {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::string_view key, std::string_view what)
{
    throw ValidationError(std::string(key) + ": " + std::string(what));
}

double to_real(std::string_view key, std::string_view text)
{
    double v = 0.0;
    const auto t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        fail(key, "expected a real number, got '" + std::string(text) + "'");
    }
    return v;
}

long long to_integer(std::string_view key, std::string_view text)
{
    long long v = 0;
    const auto t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        fail(key, "expected an integer, got '" + std::string(text) + "'");
    }
    return v;
}

std::vector<std::string_view> split_list(std::string_view text)
{
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = text.find(',');
        out.push_back(trim(text.substr(0, comma)));
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view text)
{
    const auto t = trim(text);
    if (t == "true" || t == "1" || t == "yes") {
        return true;
    }
    if (t == "false" || t == "0" || t == "no") {
        return false;
    }
    fail(key, "expected true or false, got '" + std::string(text) + "'");
}

// Keys of the format and whether they must be present.
const std::map<std::string, bool, std::less<>>& known_keys()
{
    static const std::map<std::string, bool, std::less<>> keys = {
        {"model.chi1", false},         {"model.chi2", false},
        {"model.a1", false},           {"model.a2", false},
        {"model.mu1", false},          {"model.mu2", false},
        {"model.alpha", false},        {"model.beta", false},
        {"model.gamma", false},        {"model.delta", false},
        {"model.kappa", false},        {"model.phi", false},
        {"model.phi_slope", false},    {"model.phi_file", false},
        {"grid.dim", true},            {"grid.n", true},
        {"grid.length", false},        {"grid.h", false},
        {"ic.preset", false},          {"ic.n1_mean", false},
        {"ic.n2_mean", false},         {"ic.amplitude", false},
        {"ic.n1_mode", false},         {"ic.n2_mode", false},
        {"ic.c0", false},              {"ic.c_amplitude", false},
        {"ic.background", false},      {"ic.bump_height", false},
        {"ic.bump_width", false},      {"ic.n1_file", false},
        {"ic.n2_file", false},         {"ic.c_file", false},
        {"time.end", true},            {"time.dt_max", false},
        {"time.cfl_safety", false},    {"time.positivity", false},
        {"time.density_ceiling", false}, {"time.wall_clock_limit", false},
        {"output.dir", false},         {"output.cadence", false},
        {"output.snapshots", false},   {"stokes.poisson", false},
        {"stokes.tolerance", false},   {"stokes.max_iterations", false},
        {"lyapunov.k", false},         {"lyapunov.l", false},
        {"lyapunov.cutoff", false},    {"seed", false},
    };
    return keys;
}

class KeyValues {
public:
    KeyValues(std::string_view text)
    {
        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto nl = text.find('\n', pos);
            std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
            pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string_view::npos) {
                line = line.substr(0, hash);
            }
            line = trim(line);
            if (line.empty()) {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ValidationError("line " + std::to_string(line_no) + ": expected 'key = value'");
            }
            const std::string key(trim(line.substr(0, eq)));
            const std::string value(trim(line.substr(eq + 1)));
            if (known_keys().find(key) == known_keys().end()) {
                fail(key, "unknown key");
            }
            if (!values_.emplace(key, value).second) {
                fail(key, "duplicate key");
            }
        }
        for (const auto& [key, required] : known_keys()) {
            if (required && values_.find(key) == values_.end()) {
                fail(key, "missing required key");
            }
        }
    }

    [[nodiscard]] const std::string* find(std::string_view key) const
    {
        const auto it = values_.find(key);
        return it == values_.end() ? nullptr : &it->second;
    }

    void real(std::string_view key, double& out) const
    {
        if (const auto* v = find(key)) {
            out = to_real(key, *v);
        }
    }

    void integer(std::string_view key, int& out) const
    {
        if (const auto* v = find(key)) {
            out = static_cast<int>(to_integer(key, *v));
        }
    }

    void path(std::string_view key, std::filesystem::path& out, const std::filesystem::path& base) const
    {
        if (const auto* v = find(key)) {
            std::filesystem::path p(*v);
            out = p.is_relative() && !base.empty() ? base / p : p;
        }
    }

private:
    std::map<std::string, std::string, std::less<>> values_;
};

template <class T, std::size_t N>
std::array<T, N> per_axis(std::string_view key, std::string_view text, int dim, T (*convert)(std::string_view,
                                                                                               std::string_view),
                          T fill)
{
    const auto items = split_list(text);
    std::array<T, N> out;
    out.fill(fill);
    if (items.size() == 1) {
        const T v = convert(key, items[0]);
        for (int a = 0; a < dim; ++a) {
            out[static_cast<std::size_t>(a)] = v;
        }
        return out;
    }
    if (static_cast<int>(items.size()) != dim) {
        fail(key, "expected 1 or " + std::to_string(dim) + " comma-separated values");
    }
    for (int a = 0; a < dim; ++a) {
        out[static_cast<std::size_t>(a)] = convert(key, items[static_cast<std::size_t>(a)]);
    }
    return out;
}

int to_int(std::string_view key, std::string_view text) { return static_cast<int>(to_integer(key, text)); }

void validate_config(const RunConfig& cfg)
{
    const auto report = validate_params(cfg.params);
    if (!report.valid()) {
        throw ValidationError("model: " + report.to_string());
    }
    const auto& c = cfg.control;
    if (!(c.end_time >= 0.0)) {
        fail("time.end", "must be >= 0");
    }
    if (!(c.dt_max > 0.0)) {
        fail("time.dt_max", "must be > 0");
    }
    if (!(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0)) {
        fail("time.cfl_safety", "must lie in (0, 1]");
    }
    if (!(c.output_cadence > 0.0)) {
        fail("output.cadence", "must be > 0");
    }
    if (!(c.density_ceiling > 0.0)) {
        fail("time.density_ceiling", "must be > 0");
    }
    if (!(c.wall_clock_limit >= 0.0)) {
        fail("time.wall_clock_limit", "must be >= 0");
    }
    if (!(cfg.poisson.tolerance > 0.0) || cfg.poisson.max_iterations < 1) {
        fail("stokes.tolerance", "tolerance must be > 0 and max_iterations >= 1");
    }
    if (!(cfg.energy_weights.k > 0.0)) {
        fail("lyapunov.k", "must be > 0");
    }
    if (!(cfg.energy_weights.l > 0.0)) {
        fail("lyapunov.l", "must be > 0");
    }
    if (!(cfg.transient_cutoff >= 0.0)) {
        fail("lyapunov.cutoff", "must be >= 0");
    }
    const auto& ic = cfg.initial;
    if (ic.preset == InitialPreset::CosinePerturbation) {
        if (!(ic.n1_mean - std::abs(ic.amplitude) > 0.0) || !(ic.n2_mean - std::abs(ic.amplitude) > 0.0)) {
            fail("ic.amplitude", "initial densities must stay strictly positive (|amplitude| < mean)");
        }
        if (!(ic.c_mean - std::abs(ic.c_amplitude) > 0.0)) {
            fail("ic.c_amplitude", "initial signal must stay strictly positive (|c_amplitude| < c0)");
        }
    }
    if (ic.preset == InitialPreset::TwoBump) {
        if (!(ic.background > 0.0) || !(ic.bump_height >= 0.0) || !(ic.bump_width > 0.0)) {
            fail("ic.background", "two-bump needs background > 0, bump_height >= 0, bump_width > 0");
        }
        if (!(ic.c_mean > 0.0)) {
            fail("ic.c0", "must be > 0");
        }
    }
    if (ic.preset == InitialPreset::FromFile && (ic.n1_file.empty() || ic.n2_file.empty() || ic.c_file.empty())) {
        fail("ic.preset", "file preset needs ic.n1_file, ic.n2_file and ic.c_file");
    }
    // Grid construction validates extents and spacing.
    try {
        (void)cfg.grid.make();
    }
    catch (const ValidationError& e) {
        fail("grid", e.what());
    }
}

}  // namespace

RunConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir)
{
    const KeyValues kv(text);
    RunConfig cfg;

    auto& p = cfg.params;
    kv.real("model.chi1", p.chi1);
    kv.real("model.chi2", p.chi2);
    kv.real("model.a1", p.a1);
    kv.real("model.a2", p.a2);
    kv.real("model.mu1", p.mu1);
    kv.real("model.mu2", p.mu2);
    kv.real("model.alpha", p.alpha);
    kv.real("model.beta", p.beta);
    kv.real("model.gamma", p.gamma);
    kv.real("model.delta", p.delta);
    kv.real("model.kappa", p.kappa);

    cfg.grid.dim = kv.find("grid.dim") ? to_int("grid.dim", *kv.find("grid.dim")) : 2;
    if (cfg.grid.dim < 1 || cfg.grid.dim > 3) {
        fail("grid.dim", "must be 1, 2 or 3");
    }
    const int dim = cfg.grid.dim;
    cfg.grid.cells = per_axis<int, 3>("grid.n", *kv.find("grid.n"), dim, to_int, 1);
    if (kv.find("grid.length") && kv.find("grid.h")) {
        fail("grid.h", "give either grid.length or grid.h, not both");
    }
    if (const auto* h = kv.find("grid.h")) {
        cfg.grid.spacing = per_axis<double, 3>("grid.h", *h, dim, to_real, 1.0);
    }
    else {
        Vec3 lengths{1.0, 1.0, 1.0};
        if (const auto* l = kv.find("grid.length")) {
            lengths = per_axis<double, 3>("grid.length", *l, dim, to_real, 1.0);
        }
        for (int a = 0; a < dim; ++a) {
            cfg.grid.spacing[a] = lengths[a] / cfg.grid.cells[a];
        }
    }

    const std::string phi_kind = kv.find("model.phi") ? *kv.find("model.phi") : "linear";
    if (phi_kind == "linear") {
        p.phi.kind = PotentialKind::Linear;
        if (kv.find("model.phi_file")) {
            fail("model.phi_file", "only valid with model.phi = file");
        }
        if (const auto* s = kv.find("model.phi_slope")) {
            const auto slope = per_axis<double, 3>("model.phi_slope", *s, dim, to_real, 0.0);
            for (int a = 0; a < 3; ++a) {
                p.phi.slope[a] = a < dim ? slope[a] : 0.0;
            }
        }
    }
    else if (phi_kind == "file") {
        p.phi.kind = PotentialKind::Tabulated;
        std::filesystem::path file;
        kv.path("model.phi_file", file, base_dir);
        if (file.empty()) {
            fail("model.phi_file", "required when model.phi = file");
        }
        const Snapshot snap = read_snapshot(file);
        p.phi.table = snap.values;
    }
    else {
        fail("model.phi", "expected 'linear' or 'file', got '" + phi_kind + "'");
    }

    auto& ic = cfg.initial;
    if (const auto* preset = kv.find("ic.preset")) {
        if (*preset == "cosine" || *preset == "uniform+cosine-perturbation") {
            ic.preset = InitialPreset::CosinePerturbation;
        }
        else if (*preset == "two-bump") {
            ic.preset = InitialPreset::TwoBump;
        }
        else if (*preset == "file" || *preset == "from-file") {
            ic.preset = InitialPreset::FromFile;
        }
        else {
            fail("ic.preset", "expected cosine, two-bump or file, got '" + *preset + "'");
        }
    }
    kv.real("ic.n1_mean", ic.n1_mean);
    kv.real("ic.n2_mean", ic.n2_mean);
    kv.real("ic.amplitude", ic.amplitude);
    kv.integer("ic.n1_mode", ic.n1_mode);
    kv.integer("ic.n2_mode", ic.n2_mode);
    kv.real("ic.c0", ic.c_mean);
    kv.real("ic.c_amplitude", ic.c_amplitude);
    kv.real("ic.background", ic.background);
    kv.real("ic.bump_height", ic.bump_height);
    kv.real("ic.bump_width", ic.bump_width);
    kv.path("ic.n1_file", ic.n1_file, base_dir);
    kv.path("ic.n2_file", ic.n2_file, base_dir);
    kv.path("ic.c_file", ic.c_file, base_dir);

    auto& c = cfg.control;
    kv.real("time.end", c.end_time);
    kv.real("time.dt_max", c.dt_max);
    kv.real("time.cfl_safety", c.cfl_safety);
    kv.real("time.density_ceiling", c.density_ceiling);
    kv.real("time.wall_clock_limit", c.wall_clock_limit);
    if (const auto* pos = kv.find("time.positivity")) {
        if (*pos == "reject") {
            c.positivity = PositivityPolicy::Reject;
        }
        else if (*pos == "clip") {
            c.positivity = PositivityPolicy::Clip;
        }
        else {
            fail("time.positivity", "expected reject or clip");
        }
    }
    kv.real("output.cadence", c.output_cadence);
    if (const auto* dir = kv.find("output.dir")) {
        cfg.output_dir = *dir;
    }
    if (const auto* snaps = kv.find("output.snapshots")) {
        cfg.write_snapshots = to_bool("output.snapshots", *snaps);
    }

    if (const auto* method = kv.find("stokes.poisson")) {
        if (*method == "spectral") {
            cfg.poisson.method = PoissonMethod::Spectral;
        }
        else if (*method == "cg") {
            cfg.poisson.method = PoissonMethod::ConjugateGradient;
        }
        else {
            fail("stokes.poisson", "expected spectral or cg");
        }
    }
    kv.real("stokes.tolerance", cfg.poisson.tolerance);
    kv.integer("stokes.max_iterations", cfg.poisson.max_iterations);

    kv.real("lyapunov.k", cfg.energy_weights.k);
    kv.real("lyapunov.l", cfg.energy_weights.l);
    kv.real("lyapunov.cutoff", cfg.transient_cutoff);
    cfg.energy_weights.kind = p.a1 >= 1.0 ? EnergyCase::Exclusion : EnergyCase::Coexistence;

    if (const auto* seed = kv.find("seed")) {
        const long long s = to_integer("seed", *seed);
        if (s < 0) {
            fail("seed", "must be >= 0");
        }
        cfg.seed = static_cast<std::uint64_t>(s);
    }

    validate_config(cfg);
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.parent_path());
}

std::string to_config_text(const RunConfig& cfg)
{
    std::ostringstream os;
    os.precision(17);
    const auto& p = cfg.params;
    const int dim = cfg.grid.dim;
    const auto list = [&](const auto& arr) {
        std::ostringstream l;
        l.precision(17);
        for (int a = 0; a < dim; ++a) {
            l << (a ? "," : "") << arr[static_cast<std::size_t>(a)];
        }
        return l.str();
    };
    os << "model.chi1 = " << p.chi1 << "\nmodel.chi2 = " << p.chi2 << "\nmodel.a1 = " << p.a1
       << "\nmodel.a2 = " << p.a2 << "\nmodel.mu1 = " << p.mu1 << "\nmodel.mu2 = " << p.mu2
       << "\nmodel.alpha = " << p.alpha << "\nmodel.beta = " << p.beta << "\nmodel.gamma = " << p.gamma
       << "\nmodel.delta = " << p.delta << "\nmodel.kappa = " << p.kappa << "\n";
    if (p.phi.kind == PotentialKind::Linear) {
        os << "model.phi = linear\nmodel.phi_slope = " << list(p.phi.slope) << "\n";
    }
    else {
        os << "# tabulated potential (" << p.phi.table.size() << " values) is not reproduced here\n";
    }
    os << "grid.dim = " << dim << "\ngrid.n = " << list(cfg.grid.cells) << "\ngrid.h = " << list(cfg.grid.spacing)
       << "\n";
    const auto& ic = cfg.initial;
    switch (ic.preset) {
    case InitialPreset::CosinePerturbation:
        os << "ic.preset = cosine\nic.n1_mean = " << ic.n1_mean << "\nic.n2_mean = " << ic.n2_mean
           << "\nic.amplitude = " << ic.amplitude << "\nic.n1_mode = " << ic.n1_mode << "\nic.n2_mode = "
           << ic.n2_mode << "\nic.c0 = " << ic.c_mean << "\nic.c_amplitude = " << ic.c_amplitude << "\n";
        break;
    case InitialPreset::TwoBump:
        os << "ic.preset = two-bump\nic.background = " << ic.background << "\nic.bump_height = " << ic.bump_height
           << "\nic.bump_width = " << ic.bump_width << "\nic.c0 = " << ic.c_mean << "\n";
        break;
    case InitialPreset::FromFile:
        os << "ic.preset = file\nic.n1_file = " << ic.n1_file.string() << "\nic.n2_file = " << ic.n2_file.string()
           << "\nic.c_file = " << ic.c_file.string() << "\n";
        break;
    }
    const auto& c = cfg.control;
    os << "time.end = " << c.end_time << "\ntime.dt_max = " << c.dt_max << "\ntime.cfl_safety = " << c.cfl_safety
       << "\ntime.positivity = " << (c.positivity == PositivityPolicy::Reject ? "reject" : "clip")
       << "\ntime.density_ceiling = " << c.density_ceiling << "\ntime.wall_clock_limit = " << c.wall_clock_limit
       << "\noutput.dir = " << cfg.output_dir.string() << "\noutput.cadence = " << c.output_cadence
       << "\noutput.snapshots = " << (cfg.write_snapshots ? "true" : "false")
       << "\nstokes.poisson = " << (cfg.poisson.method == PoissonMethod::Spectral ? "spectral" : "cg")
       << "\nstokes.tolerance = " << cfg.poisson.tolerance << "\nstokes.max_iterations = "
       << cfg.poisson.max_iterations << "\nlyapunov.k = " << cfg.energy_weights.k
       << "\nlyapunov.l = " << cfg.energy_weights.l << "\nlyapunov.cutoff = " << cfg.transient_cutoff
       << "\nseed = " << cfg.seed << "\n";
    return os.str();
}

namespace {

double product_of_cosines(const Grid& g, const Vec3& x, int mode)
{
    double v = 1.0;
    for (int a = 0; a < g.dim(); ++a) {
        v *= std::cos(mode * std::numbers::pi * x[a] / g.length(a));
    }
    return v;
}

ScalarField field_from_snapshot(const std::filesystem::path& file, const Grid& grid, const char* name)
{
    const Snapshot snap = read_snapshot(file);
    if (snap.header.stagger) {
        throw ValidationError(std::string(name) + ": snapshot " + file.string() + " holds a face field");
    }
    if (snap.header.dim != grid.dim() || snap.header.n != grid.extents()) {
        throw ValidationError(std::string(name) + ": snapshot " + file.string() + " does not match the grid");
    }
    ScalarField f(grid);
    std::copy(snap.values.begin(), snap.values.end(), f.values().begin());
    return f;
}

void require_strictly_positive(const ScalarField& f, const char* name)
{
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(f[i] > 0.0)) {
            const auto c = f.grid().unravel(i);
            std::ostringstream os;
            os << name << ": initial data must be strictly positive; cell (" << c[0] << ", " << c[1] << ", "
               << c[2] << ") holds " << f[i];
            throw ValidationError(os.str());
        }
    }
}

}  // namespace

SimState build_initial_state(const RunConfig& cfg)
{
    const Grid grid = cfg.grid.make();
    const auto& ic = cfg.initial;
    constexpr auto positive = InitialTag::PositiveInitial;
    switch (ic.preset) {
    case InitialPreset::CosinePerturbation: {
        auto n1 = init_from_function(
            grid, [&](const Vec3& x) { return ic.n1_mean + ic.amplitude * product_of_cosines(grid, x, ic.n1_mode); },
            positive);
        auto n2 = init_from_function(
            grid, [&](const Vec3& x) { return ic.n2_mean + ic.amplitude * product_of_cosines(grid, x, ic.n2_mode); },
            positive);
        auto c = init_from_function(
            grid, [&](const Vec3& x) { return ic.c_mean + ic.c_amplitude * product_of_cosines(grid, x, 1); },
            positive);
        return make_state(std::move(n1), std::move(n2), std::move(c));
    }
    case InitialPreset::TwoBump: {
        std::mt19937_64 rng(cfg.seed);
        const auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        Vec3 centre1{};
        Vec3 centre2{};
        for (int a = 0; a < grid.dim(); ++a) {
            centre1[a] = (0.2 + 0.6 * uniform()) * grid.length(a);
        }
        for (int a = 0; a < grid.dim(); ++a) {
            centre2[a] = (0.2 + 0.6 * uniform()) * grid.length(a);
        }
        const auto bump = [&](const Vec3& x, const Vec3& centre) {
            double r2 = 0.0;
            for (int a = 0; a < grid.dim(); ++a) {
                r2 += (x[a] - centre[a]) * (x[a] - centre[a]);
            }
            return ic.background + ic.bump_height * std::exp(-r2 / (2.0 * ic.bump_width * ic.bump_width));
        };
        auto n1 = init_from_function(grid, [&](const Vec3& x) { return bump(x, centre1); }, positive);
        auto n2 = init_from_function(grid, [&](const Vec3& x) { return bump(x, centre2); }, positive);
        auto c = init_from_function(grid, [&](const Vec3&) { return ic.c_mean; }, positive);
        return make_state(std::move(n1), std::move(n2), std::move(c));
    }
    case InitialPreset::FromFile: {
        auto n1 = field_from_snapshot(ic.n1_file, grid, "ic.n1_file");
        auto n2 = field_from_snapshot(ic.n2_file, grid, "ic.n2_file");
        auto c = field_from_snapshot(ic.c_file, grid, "ic.c_file");
        require_strictly_positive(n1, "ic.n1_file");
        require_strictly_positive(n2, "ic.n2_file");
        require_strictly_positive(c, "ic.c_file");
        return make_state(std::move(n1), std::move(n2), std::move(c));
    }
    }
    throw ValidationError("unknown initial preset");
}

SimulationSetup make_setup(const RunConfig& cfg)
{
    SimulationSetup setup;
    setup.params = cfg.params;
    setup.initial = build_initial_state(cfg);
    setup.control = cfg.control;
    setup.poisson = cfg.poisson;
    setup.energy_weights = cfg.energy_weights;
    return setup;
}

}  // namespace chemostokes
