#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "xrl/analysis.hpp"
#include "xrl/errors.hpp"

namespace xrl {

struct ChartSeries {
    std::string label;
    Series values;
};

/// Minimal self-contained SVG line chart: one polyline per series, axes with
/// a handful of ticks, legend in the top-left. Enough to eyeball learning
/// curves without a plotting dependency.
inline void write_svg_chart(const std::string& path, const std::string& title,
                            const std::vector<ChartSeries>& series,
                            const std::string& x_label = "episode",
                            const std::string& y_label = "probability of success") {
    static const char* kColors[] = {"#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#e67e22", "#16a085"};
    constexpr int width = 640, height = 420;
    constexpr int ml = 64, mr = 16, mt = 36, mb = 46;  // margins
    const double plot_w = width - ml - mr;
    const double plot_h = height - mt - mb;

    std::size_t n = 0;
    double y_min = 0.0, y_max = 1.0;
    bool first = true;
    for (const auto& s : series) {
        n = std::max(n, s.values.size());
        for (double v : s.values) {
            if (first) {
                y_min = y_max = v;
                first = false;
            }
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    }
    if (n < 2) throw std::invalid_argument("write_svg_chart: need at least 2 points");
    if (y_max - y_min < 1e-9) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    // pad the range a little unless it is the natural probability axis
    if (!(y_min >= 0.0 && y_max <= 1.0)) {
        const double pad = 0.05 * (y_max - y_min);
        y_min -= pad;
        y_max += pad;
    } else {
        y_min = 0.0;
        y_max = 1.0;
    }

    auto x_of = [&](std::size_t i) { return ml + plot_w * static_cast<double>(i) / static_cast<double>(n - 1); };
    auto y_of = [&](double v) { return mt + plot_h * (1.0 - (v - y_min) / (y_max - y_min)); };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", std::round(v * 1000.0) / 1000.0);
        return std::string(buf);
    };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">" << title << "</text>\n";

    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + plot_h
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\"" << ml + plot_w << "\" y2=\""
        << mt + plot_h << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double val = y_min + (y_max - y_min) * t / 4.0;
        const double y = y_of(val);
        out << "<line x1=\"" << ml - 4 << "\" y1=\"" << y << "\" x2=\"" << ml << "\" y2=\"" << y
            << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(val)
            << "</text>\n";
        const std::size_t xi = static_cast<std::size_t>((n - 1) * t / 4);
        const double x = x_of(xi);
        out << "<line x1=\"" << x << "\" y1=\"" << mt + plot_h << "\" x2=\"" << x << "\" y2=\""
            << mt + plot_h + 4 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << x << "\" y=\"" << mt + plot_h + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << xi
            << "</text>\n";
    }
    out << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
        << "</text>\n"
        << "<text x=\"16\" y=\"" << mt + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
        << mt + plot_h / 2 << ")\">" << y_label << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kColors[si % (sizeof(kColors) / sizeof(kColors[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.values.size(); ++i)
            out << x_of(i) << ',' << y_of(s.values[i]) << ' ';
        out << "\"/>\n";
        const double ly = mt + 14 + 16.0 * static_cast<double>(si);
        out << "<line x1=\"" << ml + 10 << "\" y1=\"" << ly << "\" x2=\"" << ml + 34 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << ml + 40 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw IoError("failed while writing " + path);
}

}  // namespace xrl
