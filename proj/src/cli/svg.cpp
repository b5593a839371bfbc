#include "cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace qsr::cli {

namespace {

constexpr double kWidth = 720;
constexpr double kPanelHeight = 320;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 50;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string panel(const LineChart& chart, double y0) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : chart.series) {
        for (double x : s.xs) xmin = std::min(xmin, x), xmax = std::max(xmax, x);
        for (double y : s.ys) {
            if (std::isfinite(y)) ymin = std::min(ymin, y), ymax = std::max(ymax, y);
        }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    if (ymin > 0.0) ymin = 0.0;
    if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;

    const double pw = kWidth - kLeft - kRight;
    const double ph = kPanelHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return y0 + kTop + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

    std::string out;
    out += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(y0 + 24) +
           "\" text-anchor=\"middle\" font-size=\"15\">" + escape(chart.title) + "</text>\n";
    out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(y0 + kTop) + "\" width=\"" + num(pw) +
           "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        out += "<text x=\"" + num(px(fx)) + "\" y=\"" + num(y0 + kTop + ph + 16) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + tick(fx) + "</text>\n";
        out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(fy) + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">" + tick(fy) + "</text>\n";
    }
    out += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(y0 + kPanelHeight - 10) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + escape(chart.x_label) + "</text>\n";
    out += "<text transform=\"translate(18," + num(y0 + kTop + ph / 2) +
           ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" + escape(chart.y_label) +
           "</text>\n";
    if (ymin < 0.0 && ymax > 0.0) {
        out += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(kLeft + pw) + "\" y1=\"" + num(py(0)) +
               "\" y2=\"" + num(py(0)) + "\" stroke=\"#aaa\" stroke-dasharray=\"4 3\"/>\n";
    }

    for (std::size_t s = 0; s < chart.series.size(); ++s) {
        const auto& series = chart.series[s];
        const char* color = kColors[s % std::size(kColors)];
        std::string points;
        for (std::size_t i = 0; i < series.xs.size() && i < series.ys.size(); ++i) {
            if (!std::isfinite(series.ys[i])) continue;
            points += num(px(series.xs[i])) + "," + num(py(series.ys[i])) + " ";
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.6\" points=\"" + points + "\"/>\n";
        const double ly = y0 + kTop + 14 + 18.0 * static_cast<double>(s);
        out += "<line x1=\"" + num(kWidth - kRight + 12) + "\" x2=\"" + num(kWidth - kRight + 32) +
               "\" y1=\"" + num(ly) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(kWidth - kRight + 38) + "\" y=\"" + num(ly + 4) +
               "\" font-size=\"11\">" + escape(series.name) + "</text>\n";
    }
    return out;
}

}  // namespace

std::string render_svg(const std::vector<LineChart>& panels) {
    const double height = kPanelHeight * static_cast<double>(std::max<std::size_t>(1, panels.size()));
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
                      "\" height=\"" + num(height) + "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) {
        out += panel(panels[i], kPanelHeight * static_cast<double>(i));
    }
    out += "</svg>\n";
    return out;
}

}  // namespace qsr::cli
