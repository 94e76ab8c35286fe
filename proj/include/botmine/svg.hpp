#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "botmine/stats.hpp"

namespace botmine {

namespace svg {

inline std::string num(double v) {
    std::ostringstream oss;
    oss.setf(std::ios::fixed);
    oss.precision(2);
    oss << v;
    return oss.str();
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

class Canvas {
public:
    Canvas(int width, int height) : width_(width), height_(height) {
        body_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
              << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
              << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n"
              << "<rect x=\"0\" y=\"0\" width=\"" << width_ << "\" height=\"" << height_
              << "\" fill=\"white\"/>\n"
              << "<style>\n"
              << "  .axis { stroke:#000; stroke-width:1; }\n"
              << "  .box { fill:#9ecae1; stroke:#3182bd; stroke-width:1; }\n"
              << "  .bar { fill:#3182bd; }\n"
              << "  .whisker { stroke:#3182bd; stroke-width:1; }\n"
              << "  .median { stroke:#08519c; stroke-width:2; }\n"
              << "  .label { font-family:sans-serif; font-size:11px; fill:#000; }\n"
              << "  .title { font-family:sans-serif; font-size:13px; font-weight:bold; }\n"
              << "</style>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& cls) {
        body_ << "<line class=\"" << cls << "\" x1=\"" << num(x1) << "\" y1=\"" << num(y1)
              << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2) << "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& cls) {
        body_ << "<rect class=\"" << cls << "\" x=\"" << num(x) << "\" y=\"" << num(y)
              << "\" width=\"" << num(w) << "\" height=\"" << num(h) << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, const std::string& cls,
              const std::string& anchor = "start") {
        body_ << "<text class=\"" << cls << "\" x=\"" << num(x) << "\" y=\"" << num(y)
              << "\" text-anchor=\"" << anchor << "\">" << escape(s) << "</text>\n";
    }

    void raw(const std::string& fragment) { body_ << fragment; }

    std::string finish() {
        body_ << "</svg>\n";
        return body_.str();
    }

    int width() const { return width_; }
    int height() const { return height_; }

private:
    int width_, height_;
    std::ostringstream body_;
};

}  // namespace svg

// Side-by-side box plots; a logarithmic value axis suits count distributions
// with heavy tails. Values are offset by one so zero still plots.
inline std::string svg_boxplot(const std::string& title,
                               const std::vector<std::string>& labels,
                               const std::vector<FiveNumberSummary>& summaries,
                               bool log_axis = true) {
    const int W = 460, H = 300, left = 60, right = 20, top = 40, bottom = 40;
    svg::Canvas c(W, H);
    c.text(W / 2.0, 20, title, "title", "middle");
    double vmax = 1;
    for (const auto& s : summaries) vmax = std::max(vmax, s.max);
    auto yof = [&](double v) {
        double t;
        if (log_axis) {
            t = std::log10(v + 1) / std::log10(vmax + 1);
        } else {
            t = vmax > 0 ? v / vmax : 0;
        }
        return H - bottom - t * (H - top - bottom);
    };
    c.line(left, top, left, H - bottom, "axis");
    c.line(left, H - bottom, W - right, H - bottom, "axis");
    for (double tick : {0.0, 1.0, 9.0, 99.0, 999.0}) {
        if (tick > vmax) break;
        double y = yof(tick);
        c.line(left - 4, y, left, y, "axis");
        c.text(left - 8, y + 4, svg::num(tick), "label", "end");
    }
    double slot = static_cast<double>(W - left - right) / std::max<size_t>(1, summaries.size());
    for (size_t i = 0; i < summaries.size(); ++i) {
        const auto& s = summaries[i];
        double cx = left + slot * (static_cast<double>(i) + 0.5);
        double half = slot * 0.22;
        c.line(cx, yof(s.min), cx, yof(s.q1), "whisker");
        c.line(cx, yof(s.q3), cx, yof(s.max), "whisker");
        c.line(cx - half * 0.6, yof(s.min), cx + half * 0.6, yof(s.min), "whisker");
        c.line(cx - half * 0.6, yof(s.max), cx + half * 0.6, yof(s.max), "whisker");
        c.rect(cx - half, yof(s.q3), 2 * half, yof(s.q1) - yof(s.q3), "box");
        c.line(cx - half, yof(s.median), cx + half, yof(s.median), "median");
        if (i < labels.size()) c.text(cx, H - bottom + 16, labels[i], "label", "middle");
    }
    return c.finish();
}

// Vertical bars over ordered (label, count) pairs.
inline std::string svg_bar_chart(const std::string& title,
                                 const std::vector<std::pair<std::string, long>>& bars) {
    const int W = 560, H = 320, left = 50, right = 20, top = 40, bottom = 90;
    svg::Canvas c(W, H);
    c.text(W / 2.0, 20, title, "title", "middle");
    long vmax = 1;
    for (const auto& [_, v] : bars) vmax = std::max(vmax, v);
    auto yof = [&](double v) {
        return H - bottom - (v / static_cast<double>(vmax)) * (H - top - bottom);
    };
    c.line(left, top, left, H - bottom, "axis");
    c.line(left, H - bottom, W - right, H - bottom, "axis");
    c.text(left - 8, yof(vmax) + 4, std::to_string(vmax), "label", "end");
    c.text(left - 8, yof(0) + 4, "0", "label", "end");
    double slot = static_cast<double>(W - left - right) / std::max<size_t>(1, bars.size());
    for (size_t i = 0; i < bars.size(); ++i) {
        double x = left + slot * static_cast<double>(i);
        double y = yof(static_cast<double>(bars[i].second));
        c.rect(x + slot * 0.15, y, slot * 0.7, (H - bottom) - y, "bar");
        c.text(x + slot * 0.5, y - 4, std::to_string(bars[i].second), "label", "middle");
        // labels rotate so neighbouring ones stay readable
        std::ostringstream t;
        t << "<text class=\"label\" transform=\"translate(" << svg::num(x + slot * 0.5) << ","
          << svg::num(H - bottom + 14) << ") rotate(45)\">" << svg::escape(bars[i].first)
          << "</text>\n";
        c.raw(t.str());
    }
    return c.finish();
}

}  // namespace botmine
