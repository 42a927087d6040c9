#include "mcca/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "mcca/errors.hpp"

namespace mcca {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 30, kTop = 40, kBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<ChartSeries>& series) {
    std::ofstream os(path);
    if (!os) throw InvalidInput("cannot write SVG: " + path.string());

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double y) { return kTop + plot_h - (y - ymin) / (ymax - ymin) * plot_h; };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << title << "</text>\n";

    // axes and ticks
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
       << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double fx = xmin + (xmax - xmin) * i / kTicks;
        const double fy = ymin + (ymax - ymin) * i / kTicks;
        os << "<line x1=\"" << px(fx) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << px(fx)
           << "\" y2=\"" << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px(fx) << "\" y=\"" << kTop + plot_h + 20
           << "\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
        os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << kLeft
           << "\" y2=\"" << py(fy) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(fy) + 4
           << "\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";
    }
    os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
       << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    os << "<text x=\"18\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\""
       << "rotate(-90 18 " << kTop + plot_h / 2 << ")\">" << y_label << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % std::size(kPalette)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[si].points) os << px(x) << ',' << py(y) << ' ';
        os << "\"/>\n";
        for (const auto& [x, y] : series[si].points)
            os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2.5\" fill=\""
               << color << "\"/>\n";
        const double ly = kTop + 14 + 16 * static_cast<double>(si);
        os << "<line x1=\"" << kWidth - kRight - 110 << "\" y1=\"" << ly << "\" x2=\""
           << kWidth - kRight - 85 << "\" y2=\"" << ly << "\" stroke=\"" << color
           << "\" stroke-width=\"1.5\"/>\n";
        os << "<text x=\"" << kWidth - kRight - 80 << "\" y=\"" << ly + 4 << "\">"
           << series[si].label << "</text>\n";
    }
    os << "</svg>\n";
}

} // namespace mcca
