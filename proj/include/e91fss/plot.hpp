#pragma once

/// Plot-ready output: gnuplot-compatible whitespace-delimited data plus a
/// minimal SVG rendering (line plot for 1-D sweeps, per-alpha heatmaps for
/// (beta, theta) surfaces). Figures are artifacts of a run, not a UI.

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "e91fss/analysis.hpp"
#include "e91fss/results_io.hpp"

namespace e91fss {

enum class PlotKind { skr, chsh };

inline std::string to_plot_data(const std::vector<GridRecord>& records) {
    std::string out =
        "# alpha beta theta n_events n_coincident skr_sim skr_analytic qber_sim cr_estimate "
        "cr_analytic seed\n";
    for (const auto& rec : records) {
        out += format_double(rec.alpha);
        out += ' ';
        out += format_double(rec.beta);
        out += ' ';
        out += format_double(rec.theta);
        out += ' ';
        out += std::to_string(rec.n_events);
        out += ' ';
        out += std::to_string(rec.n_coincident);
        out += ' ';
        out += format_double(rec.skr_sim);
        out += ' ';
        out += format_double(rec.skr_analytic);
        out += ' ';
        out += format_double(rec.qber_sim);
        out += ' ';
        out += rec.cr_estimate ? format_double(*rec.cr_estimate) : "nan";
        out += ' ';
        out += format_double(rec.cr_analytic);
        out += ' ';
        out += std::to_string(rec.seed);
        out += '\n';
    }
    return out;
}

namespace plot_detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

struct Frame {
    double x0, x1, y0, y1;      // data range
    double px0, px1, py0, py1;  // pixel range (py0 is bottom)

    double x(double v) const { return px0 + (v - x0) / (x1 - x0) * (px1 - px0); }
    double y(double v) const { return py0 - (v - y0) / (y1 - y0) * (py0 - py1); }
};

inline void axes(std::string& svg, const Frame& f, const std::string& xlabel,
                 const std::string& ylabel) {
    svg += "<line x1='" + fmt(f.px0) + "' y1='" + fmt(f.py0) + "' x2='" + fmt(f.px1) + "' y2='" +
           fmt(f.py0) + "' stroke='black'/>\n";
    svg += "<line x1='" + fmt(f.px0) + "' y1='" + fmt(f.py0) + "' x2='" + fmt(f.px0) + "' y2='" +
           fmt(f.py1) + "' stroke='black'/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = f.x0 + (f.x1 - f.x0) * t / 4.0;
        const double yv = f.y0 + (f.y1 - f.y0) * t / 4.0;
        svg += "<text x='" + fmt(f.x(xv)) + "' y='" + fmt(f.py0 + 16.0) +
               "' font-size='10' text-anchor='middle'>" + fmt(xv) + "</text>\n";
        svg += "<text x='" + fmt(f.px0 - 6.0) + "' y='" + fmt(f.y(yv) + 3.0) +
               "' font-size='10' text-anchor='end'>" + fmt(yv) + "</text>\n";
    }
    svg += "<text x='" + fmt((f.px0 + f.px1) / 2.0) + "' y='" + fmt(f.py0 + 32.0) +
           "' font-size='11' text-anchor='middle'>" + xlabel + "</text>\n";
    svg += "<text x='" + fmt(f.px0 - 40.0) + "' y='" + fmt((f.py0 + f.py1) / 2.0) +
           "' font-size='11' text-anchor='middle' transform='rotate(-90 " + fmt(f.px0 - 40.0) +
           " " + fmt((f.py0 + f.py1) / 2.0) + ")'>" + ylabel + "</text>\n";
}

/// Three-stop dark-violet -> teal -> yellow color scale on [0, 1].
inline std::string heat_color(double v) {
    v = std::clamp(v, 0.0, 1.0);
    const double stops[3][3] = {{68, 1, 84}, {33, 145, 140}, {253, 231, 37}};
    const double t = v * 2.0;
    const int lo = t < 1.0 ? 0 : 1;
    const double u = t - lo;
    std::string rgb = "rgb(";
    for (int c = 0; c < 3; ++c) {
        const int val = static_cast<int>(std::lround(stops[lo][c] * (1.0 - u) + stops[lo + 1][c] * u));
        rgb += std::to_string(val);
        rgb += c < 2 ? "," : ")";
    }
    return rgb;
}

inline std::vector<double> sorted_unique(const std::vector<GridRecord>& records,
                                         double GridRecord::*field) {
    std::set<double> s;
    for (const auto& rec : records) s.insert(rec.*field);
    return {s.begin(), s.end()};
}

inline std::string line_plot(const std::vector<GridRecord>& records, PlotKind kind,
                             double GridRecord::*xfield, const std::string& xlabel) {
    const bool chsh = kind == PlotKind::chsh;
    std::vector<std::pair<double, std::pair<double, double>>> pts;  // x -> (sim, analytic)
    for (const auto& rec : records) {
        const double sim = chsh ? (rec.cr_estimate ? std::abs(*rec.cr_estimate)
                                                   : std::numeric_limits<double>::quiet_NaN())
                                : rec.skr_sim;
        const double ana = chsh ? std::abs(rec.cr_analytic) : rec.skr_analytic;
        pts.push_back({rec.*xfield, {sim, ana}});
    }
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    const double ymax = chsh ? 2.0 * std::numbers::sqrt2 : 1.0;
    double x0 = pts.front().first, x1 = pts.back().first;
    if (x0 == x1) {  // single-point axis
        x0 -= 0.5;
        x1 += 0.5;
    }
    const Frame f{x0, x1, 0.0, ymax, 70.0, 560.0, 320.0, 30.0};
    std::string svg = "<svg xmlns='http://www.w3.org/2000/svg' width='600' height='370'>\n";
    axes(svg, f, xlabel, chsh ? "|CR|" : "SKR");

    std::string path;
    for (const auto& p : pts)
        path += (path.empty() ? "M" : " L") + fmt(f.x(p.first)) + " " + fmt(f.y(p.second.second));
    svg += "<path d='" + path + "' fill='none' stroke='steelblue' stroke-width='1.5'/>\n";
    for (const auto& p : pts) {
        if (std::isnan(p.second.first)) continue;
        svg += "<circle cx='" + fmt(f.x(p.first)) + "' cy='" + fmt(f.y(p.second.first)) +
               "' r='3' fill='crimson'/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

inline std::string heatmap(const std::vector<GridRecord>& records) {
    const auto alphas = sorted_unique(records, &GridRecord::alpha);
    const auto betas = sorted_unique(records, &GridRecord::beta);
    const auto thetas = sorted_unique(records, &GridRecord::theta);

    const double panel_w = 420.0, panel_h = 300.0, margin = 70.0, gap = 50.0;
    const double width = margin + panel_w + 40.0;
    const double height = static_cast<double>(alphas.size()) * (panel_h + gap) + 40.0;
    std::string svg = "<svg xmlns='http://www.w3.org/2000/svg' width='" + fmt(width) +
                      "' height='" + fmt(height) + "'>\n";

    const double cell_w = panel_w / static_cast<double>(thetas.size());
    const double cell_h = panel_h / static_cast<double>(betas.size());
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        const double top = 30.0 + static_cast<double>(a) * (panel_h + gap);
        const Frame f{thetas.front(), thetas.back(), betas.front(), betas.back(),
                      margin, margin + panel_w, top + panel_h, top};
        svg += "<text x='" + fmt(margin) + "' y='" + fmt(top - 8.0) +
               "' font-size='12'>alpha = " + fmt(alphas[a]) + "</text>\n";
        for (const auto& rec : records) {
            if (rec.alpha != alphas[a]) continue;
            const auto ti = std::lower_bound(thetas.begin(), thetas.end(), rec.theta) -
                            thetas.begin();
            const auto bi = std::lower_bound(betas.begin(), betas.end(), rec.beta) - betas.begin();
            svg += "<rect x='" + fmt(margin + static_cast<double>(ti) * cell_w) + "' y='" +
                   fmt(top + panel_h - static_cast<double>(bi + 1) * cell_h) + "' width='" +
                   fmt(cell_w + 0.5) + "' height='" + fmt(cell_h + 0.5) + "' fill='" +
                   heat_color(rec.skr_sim) + "'/>\n";
        }
        axes(svg, f, "theta", "beta");
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace plot_detail

/// Render the records to SVG: a line plot when only theta (or only beta)
/// varies, per-alpha heatmaps for full (beta, theta) surfaces.
inline std::string to_svg(const std::vector<GridRecord>& records, PlotKind kind) {
    const auto betas = plot_detail::sorted_unique(records, &GridRecord::beta);
    const auto thetas = plot_detail::sorted_unique(records, &GridRecord::theta);
    if (kind == PlotKind::chsh || betas.size() == 1)
        return plot_detail::line_plot(records, kind, &GridRecord::theta, "theta");
    if (thetas.size() == 1)
        return plot_detail::line_plot(records, kind, &GridRecord::beta, "beta");
    return plot_detail::heatmap(records);
}

/// Write `<stem>.dat` (gnuplot) and `<stem>.svg` next to the result file.
inline void write_plots(const std::vector<GridRecord>& records, PlotKind kind,
                        const std::string& result_path) {
    const auto dot = result_path.find_last_of('.');
    const std::string stem =
        dot == std::string::npos ? result_path : result_path.substr(0, dot);
    write_text_file(stem + ".dat", to_plot_data(records));
    write_text_file(stem + ".svg", to_svg(records, kind));
}

}  // namespace e91fss
