#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ncthermo/errors.hpp"

namespace ncthermo::app {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Axis {
    bool log{};
    double lo{}, hi{};

    double map(double v) const { return log ? std::log10(v) : v; }
    bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
    double frac(double v) const { return (map(v) - lo) / (hi - lo); }

    // Tick positions in data units.
    std::vector<double> ticks() const {
        std::vector<double> t;
        if (log) {
            for (double e = std::ceil(lo - 1e-9); e <= hi + 1e-9; e += 1.0) t.push_back(std::pow(10.0, e));
            if (t.size() < 2) t = {std::pow(10.0, lo), std::pow(10.0, hi)};
            return t;
        }
        const double span = hi - lo;
        const double raw = span / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0})
            if (m * mag >= raw) {
                step = m * mag;
                break;
            }
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
            t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
        return t;
    }
};

Axis fit(bool log, const std::vector<const std::vector<double>*>& data) {
    Axis a{log};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto* d : data)
        for (double v : *d)
            if (a.usable(v)) {
                lo = std::min(lo, a.map(v));
                hi = std::max(hi, a.map(v));
            }
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        const double pad = log ? 0.5 : std::max(0.5 * std::abs(hi), 0.5);
        lo -= pad;
        hi += pad;
    } else if (!log) {
        const double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    a.lo = lo;
    a.hi = hi;
    return a;
}

} // namespace

Series& Plot::add(std::string label, std::vector<double> x, std::vector<double> y, Stroke stroke) {
    if (x.size() != y.size()) throw ConfigError("plot: series '" + label + "' has mismatched lengths");
    series.push_back({std::move(label), std::move(x), std::move(y), stroke, false});
    return series.back();
}

std::string Plot::render(int width, int height) const {
    const double ml = 72, mr = 150, mt = 36, mb = 52;
    const double pw = width - ml - mr, ph = height - mt - mb;
    std::vector<const std::vector<double>*> xs, ys;
    for (const auto& s : series) {
        xs.push_back(&s.x);
        ys.push_back(&s.y);
    }
    const Axis ax = fit(log_x, xs), ay = fit(log_y, ys);
    auto px = [&](double v) { return ml + ax.frac(v) * pw; };
    auto py = [&](double v) { return mt + (1.0 - ay.frac(v)) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(ml + pw / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(title) << "</text>\n";
    os << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw) << "\" height=\""
       << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double t : ax.ticks()) {
        const double x = px(t);
        os << "<line x1=\"" << num(x) << "\" y1=\"" << num(mt + ph) << "\" x2=\"" << num(x) << "\" y2=\""
           << num(mt + ph + 5) << "\" stroke=\"black\"/>";
        os << "<text x=\"" << num(x) << "\" y=\"" << num(mt + ph + 18) << "\" text-anchor=\"middle\">"
           << num(t) << "</text>\n";
    }
    for (double t : ay.ticks()) {
        const double y = py(t);
        os << "<line x1=\"" << num(ml - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(ml) << "\" y2=\""
           << num(y) << "\" stroke=\"black\"/>";
        os << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << num(t)
           << "</text>\n";
    }
    os << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
       << escape(xlabel) << "</text>\n";
    os << "<text transform=\"translate(16," << num(mt + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(ylabel) << "</text>\n";

    os << "<clipPath id=\"plot\"><rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw)
       << "\" height=\"" << num(ph) << "\"/></clipPath>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = kPalette[k % std::size(kPalette)];
        const char* dash = s.stroke == Stroke::Dashed ? " stroke-dasharray=\"6 4\""
                           : s.stroke == Stroke::Dotted ? " stroke-dasharray=\"2 3\""
                                                        : "";
        // break the polyline at unusable points
        std::string pts;
        auto flush = [&] {
            if (!pts.empty())
                os << "<polyline clip-path=\"url(#plot)\" fill=\"none\" stroke=\"" << colour
                   << "\" stroke-width=\"1.5\"" << dash << " points=\"" << pts << "\"/>\n";
            pts.clear();
        };
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) {
                flush();
                continue;
            }
            pts += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
            if (s.markers)
                os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"2.5\" fill=\""
                   << colour << "\"/>\n";
        }
        flush();
        const double ly = mt + 14 + 18 * static_cast<double>(k);
        os << "<line x1=\"" << num(ml + pw + 10) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(ml + pw + 34)
           << "\" y2=\"" << num(ly) << "\" stroke=\"" << colour << "\" stroke-width=\"1.5\"" << dash << "/>";
        os << "<text x=\"" << num(ml + pw + 40) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void Plot::write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("plot: cannot write " + path.string());
    out << render();
}

} // namespace ncthermo::app
