#include "backflow/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "backflow/text_format.hpp"

namespace backflow {

namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void include(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    bool valid() const { return lo < hi; }
};

// Tick spacing on the 1-2-5 ladder giving 4..9 intervals.
double nice_step(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    double step;
    if (frac < 1.5) {
        step = 1.0;
    } else if (frac < 3.5) {
        step = 2.0;
    } else if (frac < 7.5) {
        step = 5.0;
    } else {
        step = 10.0;
    }
    return step * mag;
}

std::string fmt(double v) { return format_general(v, 6); }

}  // namespace

void SvgPlot::write(const std::filesystem::path& path) const {
    Range rx, ry;
    for (const auto& s : series) {
        for (double v : s.x) rx.include(v);
        for (double v : s.y) ry.include(v);
    }
    if (show_zero_line) ry.include(0.0);
    if (!rx.valid() || !ry.valid()) {
        throw std::invalid_argument("SvgPlot: nothing to plot (empty or degenerate data)");
    }
    const double pad_y = 0.06 * (ry.hi - ry.lo);
    ry.lo -= pad_y;
    ry.hi += pad_y;

    const double margin_l = 72, margin_r = 18, margin_t = 34, margin_b = 52;
    const double plot_w = width - margin_l - margin_r;
    const double plot_h = height - margin_t - margin_b;
    auto sx = [&](double x) { return margin_l + (x - rx.lo) / (rx.hi - rx.lo) * plot_w; };
    auto sy = [&](double y) { return margin_t + (ry.hi - y) / (ry.hi - ry.lo) * plot_h; };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (const auto& band : bands) {
        const double x0 = sx(std::max(band.x0, rx.lo));
        const double x1 = sx(std::min(band.x1, rx.hi));
        if (!(x1 > x0)) continue;
        out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(margin_t) << "\" width=\""
            << fmt(x1 - x0) << "\" height=\"" << fmt(plot_h) << "\" fill=\"" << band.color
            << "\" fill-opacity=\"" << fmt(band.opacity) << "\"/>\n";
    }

    // axes grid + ticks
    const double xstep = nice_step(rx.hi - rx.lo);
    const double ystep = nice_step(ry.hi - ry.lo);
    out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
    for (double t = std::ceil(rx.lo / xstep) * xstep; t <= rx.hi + 1e-12 * xstep; t += xstep) {
        const double px = sx(t);
        out << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(margin_t) << "\" x2=\"" << fmt(px)
            << "\" y2=\"" << fmt(margin_t + plot_h) << "\" stroke=\"#e0e0e0\"/>\n";
        out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(margin_t + plot_h + 18)
            << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    for (double t = std::ceil(ry.lo / ystep) * ystep; t <= ry.hi + 1e-12 * ystep; t += ystep) {
        const double py = sy(t);
        out << "<line x1=\"" << fmt(margin_l) << "\" y1=\"" << fmt(py) << "\" x2=\""
            << fmt(margin_l + plot_w) << "\" y2=\"" << fmt(py) << "\" stroke=\"#e0e0e0\"/>\n";
        out << "<text x=\"" << fmt(margin_l - 6) << "\" y=\"" << fmt(py + 4)
            << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
    }
    out << "</g>\n";

    if (show_zero_line && ry.lo < 0.0 && ry.hi > 0.0) {
        out << "<line x1=\"" << fmt(margin_l) << "\" y1=\"" << fmt(sy(0.0)) << "\" x2=\""
            << fmt(margin_l + plot_w) << "\" y2=\"" << fmt(sy(0.0))
            << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    }

    out << "<rect x=\"" << fmt(margin_l) << "\" y=\"" << fmt(margin_t) << "\" width=\""
        << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
        << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (const auto& s : series) {
        if (s.x.size() != s.y.size() || s.x.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
            << fmt(s.stroke_width) << "\"";
        if (s.dashed) out << " stroke-dasharray=\"6 4\"";
        out << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out << fmt(sx(s.x[i])) << ',' << fmt(sy(s.y[i]));
            if (i + 1 < s.x.size()) out << ' ';
        }
        out << "\"/>\n";
    }

    for (const auto& m : markers) {
        out << "<circle cx=\"" << fmt(sx(m.x)) << "\" cy=\"" << fmt(sy(m.y)) << "\" r=\""
            << fmt(m.radius) << "\" fill=\"none\" stroke=\"" << m.color
            << "\" stroke-width=\"1.4\"/>\n";
    }

    // legend (top right, only labelled series)
    double legend_y = margin_t + 16;
    for (const auto& s : series) {
        if (s.label.empty()) continue;
        const double lx = margin_l + plot_w - 170;
        out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(legend_y - 4) << "\" x2=\""
            << fmt(lx + 26) << "\" y2=\"" << fmt(legend_y - 4) << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"";
        if (s.dashed) out << " stroke-dasharray=\"6 4\"";
        out << "/>\n<text x=\"" << fmt(lx + 32) << "\" y=\"" << fmt(legend_y)
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">" << s.label
            << "</text>\n";
        legend_y += 18;
    }

    out << "<text x=\"" << fmt(margin_l + plot_w / 2) << "\" y=\"20\" text-anchor=\"middle\""
        << " font-family=\"sans-serif\" font-size=\"14\" fill=\"#000\">" << title
        << "</text>\n";
    out << "<text x=\"" << fmt(margin_l + plot_w / 2) << "\" y=\"" << fmt(height - 12)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << fmt(margin_t + plot_h / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\""
        << " transform=\"rotate(-90 18 " << fmt(margin_t + plot_h / 2) << ")\">" << y_label
        << "</text>\n";
    out << "</svg>\n";
}

}  // namespace backflow
