#pragma once

#include <string>
#include <vector>

namespace galpha::cli {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct LinePlot {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
};

/// Cell values on a regular grid, row-major with y outer; NaN cells are drawn grey.
struct Heatmap {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    int nx = 0;
    int ny = 0;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    double vmax = 1;  // values above vmax saturate
    std::vector<double> values;
};

std::string render_svg(const LinePlot& plot);
std::string render_svg(const Heatmap& map);

} // namespace galpha::cli
