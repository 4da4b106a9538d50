#pragma once

#include <string>
#include <vector>

namespace tsobs::app {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

// One panel of a line chart.
struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

// Panels are stacked vertically. Series longer than max_points are thinned
// with min/max bucketing so peaks survive.
std::string render_svg(const std::vector<Panel>& panels, int width = 800, int panel_height = 260,
                       std::size_t max_points = 1500);

}  // namespace tsobs::app
