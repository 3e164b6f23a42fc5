#include "chemostokes/io.hpp"

#include "chemostokes/errors.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace chemostokes {

namespace {

static_assert(sizeof(double) == sizeof(std::uint64_t));

std::string format_g17(double v)
{
    char buf[40];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(len));
}

double parse_double(std::string_view text, const std::string& where)
{
    double v = 0.0;
    if (text == "nan" || text == "-nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw IoError(where + ": cannot parse '" + std::string(text) + "' as a number");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    while (true) {
        const auto pos = line.find(sep);
        out.push_back(line.substr(0, pos));
        if (pos == std::string_view::npos) {
            return out;
        }
        line.remove_prefix(pos + 1);
    }
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, mode);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in)
{
    std::ifstream in(path, mode);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return in;
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path, std::string_view header)
{
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError(path.string() + ": empty file");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != header) {
        throw IoError(path.string() + ": unexpected header '" + line + "'");
    }
    const std::size_t columns = split(header, ',').size();
    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line, ',');
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (cells.size() != columns) {
            throw IoError(where + ": expected " + std::to_string(columns) + " columns");
        }
        std::vector<double> row(columns);
        for (std::size_t i = 0; i < columns; ++i) {
            row[i] = parse_double(cells[i], where);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

void write_timeseries(const std::filesystem::path& path, const DiagnosticsSeries& series)
{
    if (series.empty()) {
        throw IoError("refusing to write an empty timeseries to " + path.string());
    }
    auto out = open_out(path);
    out << kTimeseriesHeader << '\n';
    for (const auto& r : series) {
        const double cols[] = {r.t,           r.mass_n1, r.mass_n2, r.linf_n1_dev, r.linf_n2_dev,
                               r.linf_c,      r.l2_c,    r.linf_u,  r.l2_u,        r.min_n2,
                               r.energy,      r.dissipation, r.max_divu, r.dt};
        for (std::size_t i = 0; i < std::size(cols); ++i) {
            out << (i ? "," : "") << format_g17(cols[i]);
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

DiagnosticsSeries read_timeseries(const std::filesystem::path& path)
{
    const auto rows = read_csv(path, kTimeseriesHeader);
    DiagnosticsSeries series;
    series.reserve(rows.size());
    for (const auto& c : rows) {
        DiagnosticsRecord r;
        r.t = c[0];
        r.mass_n1 = c[1];
        r.mass_n2 = c[2];
        r.linf_n1_dev = c[3];
        r.linf_n2_dev = c[4];
        r.linf_c = c[5];
        r.l2_c = c[6];
        r.linf_u = c[7];
        r.l2_u = c[8];
        r.min_n2 = c[9];
        r.energy = c[10];
        r.dissipation = c[11];
        r.max_divu = c[12];
        r.dt = c[13];
        series.push_back(r);
    }
    return series;
}

namespace {
constexpr std::string_view kEnergyHeader = "t,energy_n1,energy_n2,energy_c";
}

void write_energy_parts(const std::filesystem::path& path, const DiagnosticsSeries& series)
{
    auto out = open_out(path);
    out << kEnergyHeader << '\n';
    for (const auto& r : series) {
        out << format_g17(r.t) << ',' << format_g17(r.energy_n1) << ',' << format_g17(r.energy_n2) << ','
            << format_g17(r.energy_c) << '\n';
    }
}

void read_energy_parts(const std::filesystem::path& path, DiagnosticsSeries& series)
{
    const auto rows = read_csv(path, kEnergyHeader);
    if (rows.size() != series.size()) {
        throw IoError(path.string() + ": row count differs from the timeseries");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][0] != series[i].t) {
            throw IoError(path.string() + ": time column differs from the timeseries at row " + std::to_string(i));
        }
        series[i].energy_n1 = rows[i][1];
        series[i].energy_n2 = rows[i][2];
        series[i].energy_c = rows[i][3];
    }
}

std::size_t SnapshotHeader::value_count() const
{
    std::size_t count = 1;
    for (int a = 0; a < 3; ++a) {
        count *= static_cast<std::size_t>(n[a]) + (stagger && *stagger == a ? 1 : 0);
    }
    return count;
}

std::string format_snapshot_header(const SnapshotHeader& hd)
{
    std::ostringstream os;
    os << "CHEMOSTOKES v1 " << hd.name << " dim=" << hd.dim << " n=" << hd.n[0] << ',' << hd.n[1] << ',' << hd.n[2]
       << " h=" << format_g17(hd.h[0]) << ',' << format_g17(hd.h[1]) << ',' << format_g17(hd.h[2])
       << " t=" << format_g17(hd.t);
    if (hd.stagger) {
        os << " stagger=" << *hd.stagger;
    }
    return os.str();
}

SnapshotHeader parse_snapshot_header(std::string_view line)
{
    const auto bad = [&](const std::string& why) {
        return IoError("bad snapshot header (" + why + "): '" + std::string(line) + "'");
    };
    const auto tokens = split(line, ' ');
    if (tokens.size() < 7 || tokens[0] != "CHEMOSTOKES" || tokens[1] != "v1") {
        throw bad("expected 'CHEMOSTOKES v1 <name> dim= n= h= t='");
    }
    SnapshotHeader hd;
    hd.name = std::string(tokens[2]);
    bool seen_dim = false, seen_n = false, seen_h = false, seen_t = false;
    for (std::size_t i = 3; i < tokens.size(); ++i) {
        const auto tok = tokens[i];
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos) {
            throw bad("token without '='");
        }
        const auto key = tok.substr(0, eq);
        const auto value = tok.substr(eq + 1);
        if (key == "dim") {
            hd.dim = static_cast<int>(parse_double(value, "dim"));
            seen_dim = true;
        }
        else if (key == "n" || key == "h") {
            const auto parts = split(value, ',');
            if (parts.size() != 3) {
                throw bad(std::string(key) + " needs three entries");
            }
            for (int a = 0; a < 3; ++a) {
                const double v = parse_double(parts[static_cast<std::size_t>(a)], std::string(key));
                if (key == "n") {
                    hd.n[a] = static_cast<int>(v);
                }
                else {
                    hd.h[a] = v;
                }
            }
            (key == "n" ? seen_n : seen_h) = true;
        }
        else if (key == "t") {
            hd.t = parse_double(value, "t");
            seen_t = true;
        }
        else if (key == "stagger") {
            hd.stagger = static_cast<int>(parse_double(value, "stagger"));
        }
        else {
            throw bad("unknown field '" + std::string(key) + "'");
        }
    }
    if (!seen_dim || !seen_n || !seen_h || !seen_t) {
        throw bad("missing dim, n, h or t");
    }
    if (hd.dim < 1 || hd.dim > 3) {
        throw bad("dim out of range");
    }
    for (int a = 0; a < 3; ++a) {
        if (hd.n[a] < 1 || !(hd.h[a] > 0.0)) {
            throw bad("n and h must be positive");
        }
    }
    if (hd.stagger && (*hd.stagger < 0 || *hd.stagger >= hd.dim)) {
        throw bad("stagger axis out of range");
    }
    return hd;
}

void write_snapshot(const std::filesystem::path& path, const SnapshotHeader& header, std::span<const double> values)
{
    if (values.size() != header.value_count()) {
        throw IoError("snapshot " + header.name + ": " + std::to_string(values.size()) + " values, header expects " +
                      std::to_string(header.value_count()));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw NonFiniteError("snapshot " + header.name + ": value " + std::to_string(i) + " is not finite");
        }
    }
    std::vector<std::uint64_t> raw(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(values[i]);
        if constexpr (std::endian::native == std::endian::big) {
            bits = __builtin_bswap64(bits);
        }
        raw[i] = bits;
    }
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out << format_snapshot_header(header) << '\n';
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(double)));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

void write_snapshot(const std::filesystem::path& path, std::string_view name, const ScalarField& f, double t)
{
    const Grid& g = f.grid();
    SnapshotHeader hd{std::string(name), g.dim(), g.extents(), g.spacing(), t, std::nullopt};
    write_snapshot(path, hd, f.values());
}

void write_snapshot(const std::filesystem::path& path, std::string_view name, const VectorField& v, int axis, double t)
{
    const Grid& g = v.grid();
    SnapshotHeader hd{std::string(name), g.dim(), g.extents(), g.spacing(), t, axis};
    write_snapshot(path, hd, v.component(axis));
}

Snapshot read_snapshot(const std::filesystem::path& path)
{
    auto in = open_in(path, std::ios::in | std::ios::binary);
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError(path.string() + ": missing snapshot header");
    }
    Snapshot snap;
    snap.header = parse_snapshot_header(line);
    const std::size_t count = snap.header.value_count();
    std::vector<std::uint64_t> raw(count);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(count * sizeof(double))) {
        throw IoError(path.string() + ": truncated payload, expected " + std::to_string(count) + " values");
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw IoError(path.string() + ": trailing bytes after payload");
    }
    snap.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = raw[i];
        if constexpr (std::endian::native == std::endian::big) {
            bits = __builtin_bswap64(bits);
        }
        snap.values[i] = std::bit_cast<double>(bits);
        if (!std::isfinite(snap.values[i])) {
            throw NonFiniteError(path.string() + ": value " + std::to_string(i) + " is not finite");
        }
    }
    return snap;
}

ScalarField read_scalar_snapshot(const std::filesystem::path& path)
{
    const Snapshot snap = read_snapshot(path);
    if (snap.header.stagger) {
        throw IoError(path.string() + ": expected a cell-centred field");
    }
    ScalarField f(Grid(snap.header.dim, snap.header.n, snap.header.h));
    std::copy(snap.values.begin(), snap.values.end(), f.values().begin());
    return f;
}

void write_state_snapshots(const std::filesystem::path& dir, const SimState& s)
{
    std::filesystem::create_directories(dir);
    write_snapshot(dir / "n1.bin", "n1", s.n1, s.t);
    write_snapshot(dir / "n2.bin", "n2", s.n2, s.t);
    write_snapshot(dir / "c.bin", "c", s.c, s.t);
    write_snapshot(dir / "p.bin", "p", s.pressure, s.t);
    for (int a = 0; a < s.grid().dim(); ++a) {
        const std::string name = "u" + std::to_string(a);
        write_snapshot(dir / (name + ".bin"), name, s.u, a, s.t);
    }
}

SimState read_state_snapshots(const std::filesystem::path& dir)
{
    SimState s = make_state(read_scalar_snapshot(dir / "n1.bin"), read_scalar_snapshot(dir / "n2.bin"),
                            read_scalar_snapshot(dir / "c.bin"));
    const Grid& g = s.grid();
    s.pressure = read_scalar_snapshot(dir / "p.bin");
    if (!(s.pressure.grid() == g)) {
        throw IoError(dir.string() + ": pressure grid differs");
    }
    for (int a = 0; a < g.dim(); ++a) {
        const std::string name = "u" + std::to_string(a);
        const Snapshot snap = read_snapshot(dir / (name + ".bin"));
        if (!snap.header.stagger || *snap.header.stagger != a || snap.header.n != g.extents()) {
            throw IoError(dir.string() + ": " + name + " does not match the grid");
        }
        std::copy(snap.values.begin(), snap.values.end(), s.u.component(a).begin());
    }
    s.t = read_snapshot(dir / "n1.bin").header.t;
    return s;
}

}  // namespace chemostokes
