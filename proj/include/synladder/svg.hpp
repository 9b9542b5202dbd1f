// svg.hpp — Minimal native SVG emission: line charts and heatmaps

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace synladder::svg {

struct Series {
    std::string label;
    std::vector<double> x, y;
};

namespace detail {

inline std::string color(int i) {
    static const char* palette[] = {"#c03028", "#2860c0", "#2c9442", "#8038b0",
                                    "#c07818", "#10a0a8", "#a03068", "#606060"};
    return palette[i % 8];
}

inline std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

struct Frame {
    double x0, x1, y0, y1;          // data range
    double px0, px1, py0, py1;      // pixel box (py grows downward)
    double px(double x) const { return px0 + (x - x0) / (x1 - x0) * (px1 - px0); }
    double py(double y) const { return py0 - (y - y0) / (y1 - y0) * (py0 - py1); }
};

inline void axes(std::ostringstream& os, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
    os << "<rect x='" << f.px0 << "' y='" << f.py1 << "' width='" << f.px1 - f.px0 << "' height='" << f.py0 - f.py1
       << "' fill='none' stroke='black'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double x = f.x0 + (f.x1 - f.x0) * i / 4.0;
        const double y = f.y0 + (f.y1 - f.y0) * i / 4.0;
        os << "<text x='" << f.px(x) << "' y='" << f.py0 + 16 << "' font-size='11' text-anchor='middle'>" << num(x)
           << "</text>\n";
        os << "<text x='" << f.px0 - 6 << "' y='" << f.py(y) + 4 << "' font-size='11' text-anchor='end'>" << num(y)
           << "</text>\n";
    }
    os << "<text x='" << 0.5 * (f.px0 + f.px1) << "' y='" << f.py0 + 32 << "' font-size='12' text-anchor='middle'>"
       << xlabel << "</text>\n";
    os << "<text x='" << f.px0 - 48 << "' y='" << 0.5 * (f.py0 + f.py1)
       << "' font-size='12' text-anchor='middle' transform='rotate(-90 " << f.px0 - 48 << " "
       << 0.5 * (f.py0 + f.py1) << ")'>" << ylabel << "</text>\n";
}

// perceptually ordered dark-to-light map
inline std::string heat_color(double v) {
    v = std::clamp(v, 0.0, 1.0);
    const int r = static_cast<int>(255 * std::clamp(1.5 * v, 0.0, 1.0));
    const int g = static_cast<int>(255 * std::clamp(1.5 * v - 0.25, 0.0, 1.0) * 0.85);
    const int b = static_cast<int>(255 * (0.35 + 0.4 * (1.0 - v)));
    std::ostringstream os;
    os << "rgb(" << r << "," << g << "," << b << ")";
    return os.str();
}

}  // namespace detail

inline void write_line_chart(const std::string& path, const std::vector<Series>& series, const std::string& xlabel,
                             const std::string& ylabel, const std::string& title = "") {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!(x1 > x0)) x1 = x0 + 1;
    if (!(y1 > y0)) y1 = y0 + 1;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    detail::Frame f{x0, x1, y0, y1, 70, 640, 420, 40};

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='780' height='470'>\n";
    if (!title.empty())
        os << "<text x='355' y='22' font-size='13' text-anchor='middle'>" << title << "</text>\n";
    detail::axes(os, f, xlabel, ylabel);
    int idx = 0;
    for (const auto& s : series) {
        os << "<polyline fill='none' stroke='" << detail::color(idx) << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i) os << f.px(s.x[i]) << "," << f.py(s.y[i]) << " ";
        os << "'/>\n";
        os << "<text x='655' y='" << 50 + 16 * idx << "' font-size='11' fill='" << detail::color(idx) << "'>"
           << s.label << "</text>\n";
        ++idx;
    }
    os << "</svg>\n";
    std::ofstream out(path);
    out << os.str();
}

inline void write_heatmap(const std::string& path, const Eigen::VectorXd& ax1, const Eigen::VectorXd& ax2,
                          const Eigen::MatrixXd& value, const std::string& xlabel, const std::string& ylabel,
                          const std::string& title = "") {
    // ax1 runs along y (rows), ax2 along x (columns), matching the sweep layout
    double v0 = 1e300, v1 = -1e300;
    for (Eigen::Index i = 0; i < value.rows(); ++i)
        for (Eigen::Index j = 0; j < value.cols(); ++j)
            if (std::isfinite(value(i, j))) {
                v0 = std::min(v0, value(i, j));
                v1 = std::max(v1, value(i, j));
            }
    if (!(v1 > v0)) v1 = v0 + 1;
    detail::Frame f{ax2.minCoeff(), ax2.maxCoeff(), ax1.minCoeff(), ax1.maxCoeff(), 70, 640, 420, 40};

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='780' height='470'>\n";
    if (!title.empty())
        os << "<text x='355' y='22' font-size='13' text-anchor='middle'>" << title << "</text>\n";
    const double w = (640.0 - 70.0) / std::max<Eigen::Index>(1, ax2.size());
    const double h = (420.0 - 40.0) / std::max<Eigen::Index>(1, ax1.size());
    for (Eigen::Index i = 0; i < value.rows(); ++i)
        for (Eigen::Index j = 0; j < value.cols(); ++j) {
            const bool ok = std::isfinite(value(i, j));
            const std::string fill = ok ? detail::heat_color((value(i, j) - v0) / (v1 - v0)) : "#bbbbbb";
            os << "<rect x='" << 70 + j * w << "' y='" << 420 - (i + 1) * h << "' width='" << w * 1.02
               << "' height='" << h * 1.02 << "' fill='" << fill << "'/>\n";
        }
    detail::axes(os, f, xlabel, ylabel);
    os << "<text x='655' y='50' font-size='11'>min " << detail::num(v0) << "</text>\n";
    os << "<text x='655' y='66' font-size='11'>max " << detail::num(v1) << "</text>\n";
    os << "</svg>\n";
    std::ofstream out(path);
    out << os.str();
}

}  // namespace synladder::svg
