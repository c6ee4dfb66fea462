#pragma once

// Minimal SVG chart builder for the report figures: histogram bars over [0,1]
// plus an optional density curve. No external renderer involved; output is a
// standalone .svg file.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dresp/csv.hpp"

namespace svg {

struct Series {
    dresp::Histogram hist;
    std::string label;
    std::string color;
    double opacity = 0.65;
};

struct Curve {
    std::vector<std::pair<double, double>> points;  // (x, density)
    std::string label;
    std::string color;
};

inline double nice_step(double span) {
    if (span <= 0) return 1.0;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (raw <= m * mag) return m * mag;
    return 10.0 * mag;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

class Chart {
public:
    Chart(std::string title, std::string x_label)
        : title_(std::move(title)), x_label_(std::move(x_label)) {}

    void add_histogram(Series s) { series_.push_back(std::move(s)); }
    void add_curve(Curve c) { curves_.push_back(std::move(c)); }

    // Histogram bars are drawn as densities so differently sized groups share
    // a scale. curve_cap bounds the y-axis against divergent densities.
    void write(const std::string& path, bool timestamp_comment, const std::string& stamp,
               double curve_cap = 12.0) const {
        const double W = 640, H = 420, L = 62, R = 18, T = 34, B = 50;
        const double plot_w = W - L - R, plot_h = H - T - B;

        double ymax = 0;
        for (const Series& s : series_) {
            double total = 0;
            for (auto c : s.hist.counts) total += static_cast<double>(c);
            for (std::size_t k = 0; k < s.hist.counts.size(); ++k) {
                const double w = s.hist.edges[k + 1] - s.hist.edges[k];
                if (total > 0 && w > 0)
                    ymax = std::max(ymax, static_cast<double>(s.hist.counts[k]) / (total * w));
            }
        }
        for (const Curve& c : curves_)
            for (const auto& p : c.points) ymax = std::max(ymax, std::min(p.second, curve_cap));
        if (ymax <= 0) ymax = 1.0;
        ymax *= 1.08;

        auto px = [&](double x) { return L + x * plot_w; };
        auto py = [&](double y) { return T + plot_h - std::min(y, ymax) / ymax * plot_h; };

        std::string out;
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" +
               fmt(H) + "\" viewBox=\"0 0 " + fmt(W) + " " + fmt(H) + "\">\n";
        if (timestamp_comment) out += "<!-- generated " + stamp + " -->\n";
        out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out += "<text x=\"" + fmt(L) + "\" y=\"20\" font-family=\"sans-serif\" font-size=\"15\" "
               "fill=\"#222\">" + title_ + "</text>\n";

        // bars
        for (const Series& s : series_) {
            double total = 0;
            for (auto c : s.hist.counts) total += static_cast<double>(c);
            if (total == 0) continue;
            for (std::size_t k = 0; k < s.hist.counts.size(); ++k) {
                const double x0 = s.hist.edges[k], x1 = s.hist.edges[k + 1];
                const double density = static_cast<double>(s.hist.counts[k]) / (total * (x1 - x0));
                if (density <= 0) continue;
                out += "<rect x=\"" + fmt(px(x0)) + "\" y=\"" + fmt(py(density)) + "\" width=\"" +
                       fmt(px(x1) - px(x0)) + "\" height=\"" + fmt(py(0) - py(density)) +
                       "\" fill=\"" + s.color + "\" fill-opacity=\"" + fmt(s.opacity) + "\"/>\n";
            }
        }

        // curves
        for (const Curve& c : curves_) {
            std::string pts;
            for (const auto& p : c.points) {
                if (!std::isfinite(p.second)) continue;
                pts += fmt(px(p.first)) + "," + fmt(py(std::min(p.second, ymax))) + " ";
            }
            out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + c.color +
                   "\" stroke-width=\"2\"/>\n";
        }

        // axes
        out += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(T + plot_h) + "\" x2=\"" + fmt(L + plot_w) +
               "\" y2=\"" + fmt(T + plot_h) + "\" stroke=\"#333\"/>\n";
        out += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(T) + "\" x2=\"" + fmt(L) + "\" y2=\"" +
               fmt(T + plot_h) + "\" stroke=\"#333\"/>\n";
        for (int i = 0; i <= 4; ++i) {
            const double x = i / 4.0;
            out += "<line x1=\"" + fmt(px(x)) + "\" y1=\"" + fmt(T + plot_h) + "\" x2=\"" +
                   fmt(px(x)) + "\" y2=\"" + fmt(T + plot_h + 5) + "\" stroke=\"#333\"/>\n";
            out += "<text x=\"" + fmt(px(x)) + "\" y=\"" + fmt(T + plot_h + 20) +
                   "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
                   "fill=\"#333\">" + fmt(x) + "</text>\n";
        }
        const double step = nice_step(ymax);
        for (double y = 0; y <= ymax + 1e-12; y += step) {
            out += "<line x1=\"" + fmt(L - 5) + "\" y1=\"" + fmt(py(y)) + "\" x2=\"" + fmt(L) +
                   "\" y2=\"" + fmt(py(y)) + "\" stroke=\"#333\"/>\n";
            out += "<text x=\"" + fmt(L - 9) + "\" y=\"" + fmt(py(y) + 4) +
                   "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\" "
                   "fill=\"#333\">" + fmt(y) + "</text>\n";
        }
        out += "<text x=\"" + fmt(L + plot_w / 2) + "\" y=\"" + fmt(H - 10) +
               "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
               "fill=\"#222\">" + x_label_ + "</text>\n";

        // legend, top right
        double ly = T + 8;
        auto legend_row = [&](const std::string& color, const std::string& label, bool line) {
            if (label.empty()) return;
            if (line)
                out += "<line x1=\"" + fmt(L + plot_w - 150) + "\" y1=\"" + fmt(ly + 5) +
                       "\" x2=\"" + fmt(L + plot_w - 132) + "\" y2=\"" + fmt(ly + 5) +
                       "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
            else
                out += "<rect x=\"" + fmt(L + plot_w - 150) + "\" y=\"" + fmt(ly - 2) +
                       "\" width=\"18\" height=\"12\" fill=\"" + color +
                       "\" fill-opacity=\"0.65\"/>\n";
            out += "<text x=\"" + fmt(L + plot_w - 126) + "\" y=\"" + fmt(ly + 8) +
                   "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">" + label +
                   "</text>\n";
            ly += 18;
        };
        for (const Series& s : series_) legend_row(s.color, s.label, false);
        for (const Curve& c : curves_) legend_row(c.color, c.label, true);

        out += "</svg>\n";

        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write " + path);
        f << out;
    }

private:
    std::string title_;
    std::string x_label_;
    std::vector<Series> series_;
    std::vector<Curve> curves_;
};

}  // namespace svg
