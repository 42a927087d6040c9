#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace mcca {

struct ChartSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

/// Minimal SVG line chart: axes with tick labels, one polyline per series,
/// legend in the top-right corner.
void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<ChartSeries>& series);

} // namespace mcca
