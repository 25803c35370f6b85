// Minimal self-contained SVG line plots (no external plotting dependency).
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace backflow {

struct SvgSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    double stroke_width = 1.2;
    bool dashed = false;
    std::string label;
};

struct SvgBand {  // shaded vertical region, e.g. a backflow window
    double x0 = 0.0;
    double x1 = 0.0;
    std::string color = "#d62728";
    double opacity = 0.18;
};

struct SvgMarker {
    double x = 0.0;
    double y = 0.0;
    std::string color = "#2ca02c";
    double radius = 2.5;
};

struct SvgPlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<SvgSeries> series;
    std::vector<SvgBand> bands;
    std::vector<SvgMarker> markers;
    bool show_zero_line = false;
    int width = 860;
    int height = 520;

    void write(const std::filesystem::path& path) const;
};

}  // namespace backflow
