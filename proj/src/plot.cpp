#include "chemostokes/plot.hpp"

#include "chemostokes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace chemostokes {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += ch;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void widen_if_flat()
    {
        if (!(lo < hi)) {
            const double pad = lo == 0.0 ? 1.0 : 0.5 * std::abs(lo);
            lo -= pad;
            hi += pad;
        }
    }
};

std::vector<double> linear_ticks(const Range& r)
{
    const double span = r.hi - r.lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> ticks;
    for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 1e-9 * step; v += step) {
        ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return ticks;
}

}  // namespace

std::string render_svg(const PlotSpec& spec)
{
    const std::size_t n = spec.x.size();
    if (n < 2) {
        throw ValidationError("plot '" + spec.title + "' needs at least 2 records");
    }
    for (const auto& s : spec.series) {
        if (s.y.size() != n) {
            throw ValidationError("plot '" + spec.title + "': series '" + s.label + "' has the wrong length");
        }
    }

    const auto transform = [&](double v) {
        if (!spec.log_y) {
            return v;
        }
        return std::log10(std::max(v, kLogPlotFloor));
    };

    Range xr;
    Range yr;
    for (double x : spec.x) {
        if (std::isfinite(x)) {
            xr.add(x);
        }
    }
    for (const auto& s : spec.series) {
        for (double v : s.y) {
            if (std::isfinite(v)) {
                yr.add(transform(v));
            }
        }
    }
    if (!std::isfinite(xr.lo)) {
        throw ValidationError("plot '" + spec.title + "': no finite x values");
    }
    if (!std::isfinite(yr.lo)) {
        yr.lo = spec.log_y ? std::log10(kLogPlotFloor) : 0.0;
        yr.hi = yr.lo;
    }
    xr.widen_if_flat();
    if (spec.log_y) {
        yr.lo = std::floor(yr.lo);
        yr.hi = std::ceil(yr.hi);
    }
    yr.widen_if_flat();

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    const auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << escape(spec.title) << "</text>\n";
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double t : linear_ticks(xr)) {
        os << "<line x1=\"" << px(t) << "\" y1=\"" << kTop + ph << "\" x2=\"" << px(t) << "\" y2=\"" << kTop + ph + 5
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px(t) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << num(t)
           << "</text>\n";
    }
    std::vector<double> yticks;
    if (spec.log_y) {
        const int stride = std::max(1, static_cast<int>(std::ceil((yr.hi - yr.lo) / 8.0)));
        for (double e = yr.lo; e <= yr.hi + 1e-9; e += stride) {
            yticks.push_back(e);
        }
    }
    else {
        yticks = linear_ticks(yr);
    }
    for (double t : yticks) {
        const std::string label = spec.log_y ? "1e" + num(t) : num(t);
        os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(t) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << py(t)
           << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(t) + 4 << "\" text-anchor=\"end\">" << label
           << "</text>\n";
    }
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">t</text>\n";
    os << "<text transform=\"translate(18," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(spec.y_label) << "</text>\n";

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& s = spec.series[k];
        const char* color = kColors[k % std::size(kColors)];
        std::ostringstream path;
        bool pen_down = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s.y[i]) || !std::isfinite(spec.x[i])) {
                pen_down = false;
                continue;
            }
            path << (pen_down ? " L" : " M") << num(px(spec.x[i])) << ',' << num(py(transform(s.y[i])));
            pen_down = true;
        }
        os << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        const double ly = kTop + 16.0 + 20.0 * static_cast<double>(k);
        os << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 36 << "\" y2=\"" << ly
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << kLeft + pw + 42 << "\" y=\"" << ly + 4 << "\">" << escape(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::array<std::filesystem::path, 3> emit_plots(const DiagnosticsSeries& series, const std::filesystem::path& dir)
{
    if (series.size() < 2) {
        throw ValidationError("plots need at least 2 records, have " + std::to_string(series.size()));
    }
    std::vector<double> t;
    PlotSeries dev1{"|n1 - N1|inf", {}};
    PlotSeries dev2{"|n2 - N2|inf", {}};
    PlotSeries cinf{"|c|inf", {}};
    PlotSeries u2{"|u|2", {}};
    PlotSeries energy{"E", {}};
    PlotSeries diss{"F", {}};
    for (const auto& r : series) {
        t.push_back(r.t);
        dev1.y.push_back(r.linf_n1_dev);
        dev2.y.push_back(r.linf_n2_dev);
        cinf.y.push_back(r.linf_c);
        u2.y.push_back(r.l2_u);
        energy.y.push_back(r.energy);
        diss.y.push_back(r.dissipation);
    }
    const PlotSpec specs[3] = {
        {"Density deviation from the steady state", "sup-norm deviation", true, t, {dev1, dev2}},
        {"Signal and velocity", "norm", false, t, {cinf, u2}},
        {"Energy and dissipation", "value", true, t, {energy, diss}},
    };
    const std::array<std::filesystem::path, 3> paths = {dir / "densities.svg", dir / "signal_velocity.svg",
                                                        dir / "energy.svg"};
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < 3; ++i) {
        const std::string svg = render_svg(specs[i]);
        std::ofstream out(paths[i]);
        if (!out || !(out << svg)) {
            throw IoError("cannot write " + paths[i].string());
        }
    }
    return paths;
}

}  // namespace chemostokes
