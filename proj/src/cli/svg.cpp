#include "cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace galpha::cli {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0, hi = 1;
    bool log = false;

    double map(double v, double a, double b) const {
        const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
        return a + t * (b - a);
    }
    double label(double t) const { return log ? std::pow(10.0, lo + t * (hi - lo)) : lo + t * (hi - lo); }
};

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0); }

Axis make_axis(const std::vector<const std::vector<double>*>& data, bool log) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto* d : data) {
        for (double v : *d) {
            if (!usable(v, log)) continue;
            const double w = log ? std::log10(v) : v;
            lo = std::min(lo, w);
            hi = std::max(hi, w);
        }
    }
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    return {lo, hi, log};
}

void frame(std::ostringstream& s, const std::string& title, const std::string& xlabel, const std::string& ylabel) {
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";
    s << "<text x=\"" << num(kLeft + (kWidth - kLeft - kRight) / 2) << "\" y=\"" << num(kHeight - 10)
      << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
    s << "<text transform=\"translate(16," << num(kTop + (kHeight - kTop - kBottom) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n";
}

void ticks(std::ostringstream& s, const Axis& ax, const Axis& ay) {
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    for (int i = 0; i <= 4; ++i) {
        const double t = i / 4.0;
        const double px = x0 + t * (x1 - x0), py = y0 + t * (y1 - y0);
        s << "<text x=\"" << num(px) << "\" y=\"" << num(y0 + 16) << "\" text-anchor=\"middle\">" << tick(ax.label(t))
          << "</text>\n";
        s << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">" << tick(ay.label(t))
          << "</text>\n";
    }
    s << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0) << "\" height=\""
      << num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
}

} // namespace

std::string render_svg(const LinePlot& plot) {
    std::vector<const std::vector<double>*> xs, ys;
    for (const auto& s : plot.series) {
        xs.push_back(&s.x);
        ys.push_back(&s.y);
    }
    const Axis ax = make_axis(xs, plot.log_x), ay = make_axis(ys, plot.log_y);
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;

    std::ostringstream s;
    frame(s, plot.title, plot.xlabel, plot.ylabel);
    ticks(s, ax, ay);
    for (std::size_t i = 0; i < plot.series.size(); ++i) {
        const auto& ser = plot.series[i];
        const char* colour = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
        s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t p = 0; p < ser.x.size() && p < ser.y.size(); ++p) {
            if (!usable(ser.x[p], plot.log_x) || !usable(ser.y[p], plot.log_y)) continue;
            if (!first) s << ' ';
            s << num(ax.map(ser.x[p], x0, x1)) << ',' << num(ay.map(ser.y[p], y0, y1));
            first = false;
        }
        s << "\"/>\n";
        const double ly = y1 + 16 + 16 * static_cast<double>(i);
        s << "<line x1=\"" << num(x1 - 150) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(x1 - 130) << "\" y2=\""
          << num(ly - 4) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        s << "<text x=\"" << num(x1 - 125) << "\" y=\"" << num(ly) << "\">" << escape(ser.label) << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::string render_svg(const Heatmap& map) {
    const Axis ax{map.x0, map.x1, false}, ay{map.y0, map.y1, false};
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    const double cw = (x1 - x0) / std::max(1, map.nx), ch = (y0 - y1) / std::max(1, map.ny);

    std::ostringstream s;
    frame(s, map.title, map.xlabel, map.ylabel);
    for (int iy = 0; iy < map.ny; ++iy) {
        for (int ix = 0; ix < map.nx; ++ix) {
            const double v = map.values[static_cast<std::size_t>(iy * map.nx + ix)];
            std::string fill = "#999999";
            if (std::isfinite(v)) {
                const double t = std::clamp(v / map.vmax, 0.0, 1.0);
                const int r = static_cast<int>(255 * t), b = static_cast<int>(255 * (1 - t));
                char buf[16];
                std::snprintf(buf, sizeof buf, "#%02x40%02x", r, b);
                fill = buf;
            }
            s << "<rect x=\"" << num(x0 + ix * cw) << "\" y=\"" << num(y0 - (iy + 1) * ch) << "\" width=\""
              << num(cw) << "\" height=\"" << num(ch) << "\" fill=\"" << fill << "\"/>\n";
        }
    }
    ticks(s, ax, ay);
    s << "</svg>\n";
    return s.str();
}

} // namespace galpha::cli
