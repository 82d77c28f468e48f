#pragma once

#include <string>
#include <vector>

namespace swipt::cli {

struct PlotSeries {
    std::string name;
    std::vector<double> x, y;
};

// Renders a static line chart (vector SVG). Non-positive y values are
// dropped when log_y is set.
void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series, bool log_y);

} // namespace swipt::cli
