#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "waveinv/errors.hpp"
#include "waveinv/io.hpp"
#include "waveinv/radon.hpp"

namespace waveinv {

struct PlotSeries {
    std::vector<double> x, y;
    std::string label;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace detail

/// Static log-log scatter plot with an optional least-squares fit line and
/// slope annotation (three decimals, matching the tabulated record).
inline std::string svg_loglog(const PlotSeries& series, const std::string& title,
                              bool with_fit = true) {
    if (series.x.empty() || series.x.size() != series.y.size())
        throw EmptySeries("svg_loglog: empty or ragged series");
    const int W = 640, H = 480, ML = 70, MR = 20, MT = 40, MB = 50;
    std::vector<double> lx, ly;
    for (size_t i = 0; i < series.x.size(); ++i) {
        if (!(series.x[i] > 0.0) || !(series.y[i] > 0.0))
            throw EmptySeries("svg_loglog: log axes need positive data");
        lx.push_back(std::log10(series.x[i]));
        ly.push_back(std::log10(series.y[i]));
    }
    double x0 = *std::min_element(lx.begin(), lx.end());
    double x1 = *std::max_element(lx.begin(), lx.end());
    double y0 = *std::min_element(ly.begin(), ly.end());
    double y1 = *std::max_element(ly.begin(), ly.end());
    if (x1 - x0 < 1e-12) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (y1 - y0 < 1e-12) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double padx = 0.06 * (x1 - x0), pady = 0.08 * (y1 - y0);
    x0 -= padx;
    x1 += padx;
    y0 -= pady;
    y1 += pady;
    auto px = [&](double v) { return ML + (v - x0) / (x1 - x0) * (W - ML - MR); };
    auto py = [&](double v) { return H - MB - (v - y0) / (y1 - y0) * (H - MT - MB); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
       << "</text>\n";
    // axes
    os << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
       << H - MB << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB
       << "\" stroke=\"black\"/>\n";
    // decade ticks
    for (int d = static_cast<int>(std::ceil(x0)); d <= static_cast<int>(std::floor(x1)); ++d) {
        os << "<line x1=\"" << detail::svg_num(px(d)) << "\" y1=\"" << H - MB << "\" x2=\""
           << detail::svg_num(px(d)) << "\" y2=\"" << H - MB + 6 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << detail::svg_num(px(d)) << "\" y=\"" << H - MB + 22
           << "\" text-anchor=\"middle\" font-size=\"12\">1e" << d << "</text>\n";
    }
    for (int d = static_cast<int>(std::ceil(y0)); d <= static_cast<int>(std::floor(y1)); ++d) {
        os << "<line x1=\"" << ML - 6 << "\" y1=\"" << detail::svg_num(py(d)) << "\" x2=\"" << ML
           << "\" y2=\"" << detail::svg_num(py(d)) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << ML - 10 << "\" y=\"" << detail::svg_num(py(d) + 4)
           << "\" text-anchor=\"end\" font-size=\"12\">1e" << d << "</text>\n";
    }
    // markers
    for (size_t i = 0; i < lx.size(); ++i)
        os << "<circle cx=\"" << detail::svg_num(px(lx[i])) << "\" cy=\""
           << detail::svg_num(py(ly[i])) << "\" r=\"4\" fill=\"steelblue\"/>\n";
    // fit line + slope annotation (needs at least two points)
    if (with_fit && lx.size() >= 2) {
        const size_t n = lx.size();
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < n; ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double inter = (sy - slope * sx) / n;
        os << "<line x1=\"" << detail::svg_num(px(x0 + padx)) << "\" y1=\""
           << detail::svg_num(py(inter + slope * (x0 + padx))) << "\" x2=\""
           << detail::svg_num(px(x1 - padx)) << "\" y2=\""
           << detail::svg_num(py(inter + slope * (x1 - padx)))
           << "\" stroke=\"firebrick\" stroke-dasharray=\"6 3\"/>\n";
        char ann[64];
        std::snprintf(ann, sizeof(ann), "slope = %.3f", slope);
        os << "<text x=\"" << W - MR - 10 << "\" y=\"" << MT + 18
           << "\" text-anchor=\"end\" font-size=\"14\" fill=\"firebrick\">" << ann << "</text>\n";
    }
    if (!series.label.empty())
        os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
           << "\" text-anchor=\"middle\" font-size=\"13\">" << series.label << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

/// Heatmap of a 2D field; the color scale is symmetric about zero (blue
/// negative, white zero, red positive).
inline std::string svg_heatmap(const SpatialField2D& f, const std::string& title) {
    if (f.v.empty()) throw EmptySeries("svg_heatmap: empty field");
    double vmax = 0.0;
    for (double v : f.v) vmax = std::max(vmax, std::abs(v));
    if (vmax == 0.0) vmax = 1.0;
    const int W = 560, H = 600, M = 40;
    const double cw = static_cast<double>(W - 2 * M) / f.nx;
    const double ch = static_cast<double>(W - 2 * M) / f.ny;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
       << "</text>\n";
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) {
            const double t = f.at(i, j) / vmax;  // in [-1, 1]
            const int r = t >= 0 ? 255 : static_cast<int>(255 * (1.0 + t));
            const int b = t <= 0 ? 255 : static_cast<int>(255 * (1.0 - t));
            const int gc = static_cast<int>(255 * (1.0 - std::abs(t)));
            os << "<rect x=\"" << detail::svg_num(M + i * cw) << "\" y=\""
               << detail::svg_num(M + 20 + (f.ny - 1 - j) * ch) << "\" width=\""
               << detail::svg_num(cw + 0.5) << "\" height=\"" << detail::svg_num(ch + 0.5)
               << "\" fill=\"rgb(" << r << "," << gc << "," << b << ")\"/>\n";
        }
    char ann[64];
    std::snprintf(ann, sizeof(ann), "scale: +/- %.3g", vmax);
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 14 << "\" text-anchor=\"middle\" font-size=\"13\">"
       << ann << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace waveinv
