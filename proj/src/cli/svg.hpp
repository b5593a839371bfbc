#ifndef QSR_CLI_SVG_HPP
#define QSR_CLI_SVG_HPP

#include <string>
#include <vector>

namespace qsr::cli {

struct Series {
    std::string name;
    std::vector<double> xs;
    std::vector<double> ys;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

/// Static SVG with the charts stacked vertically, one panel each. Every
/// panel has its own y range.
std::string render_svg(const std::vector<LineChart>& panels);

}  // namespace qsr::cli

#endif  // QSR_CLI_SVG_HPP
