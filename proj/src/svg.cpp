#include "odflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace odflow::svg {

namespace {

constexpr int kWidth = 640, kHeight = 440;
constexpr int kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

const char* kPalette[] = {"#1f6fb2", "#d1495b", "#3a9d60", "#8a5fbf", "#c98a1c", "#4f5d75"};

struct Range {
    double lo = 0.0, hi = 1.0;

    void expand(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad() {
        if (hi <= lo) hi = lo + 1.0;
        const double margin = 0.05 * (hi - lo);
        lo -= margin;
        hi += margin;
    }
};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
}

double px_x(double v, const Range& r) { return kLeft + (v - r.lo) / (r.hi - r.lo) * (kWidth - kLeft - kRight); }
double px_y(double v, const Range& r) {
    return kHeight - kBottom - (v - r.lo) / (r.hi - r.lo) * (kHeight - kTop - kBottom);
}

std::string chart_frame(const std::string& title, const std::string& x_label, const std::string& y_label,
                        const Range& xr, const Range& yr) {
    std::string out;
    out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kWidth - kLeft - kRight) +
           "\" height=\"" + num(kHeight - kTop - kBottom) + "\" fill=\"none\" stroke=\"#444444\"/>\n";
    out += "<text x=\"" + num(kWidth / 2.0) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           escape(title) + "</text>\n";
    out += "<text x=\"" + num(kWidth / 2.0) + "\" y=\"" + num(kHeight - 12) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + escape(x_label) + "</text>\n";
    out += "<text x=\"16\" y=\"" + num(kHeight / 2.0) + "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " +
           num(kHeight / 2.0) + ")\">" + escape(y_label) + "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = xr.lo + (xr.hi - xr.lo) * k / 4.0;
        const double fy = yr.lo + (yr.hi - yr.lo) * k / 4.0;
        out += "<text x=\"" + num(px_x(fx, xr)) + "\" y=\"" + num(kHeight - kBottom + 16) +
               "\" text-anchor=\"middle\" font-size=\"10\">" + num(fx) + "</text>\n";
        out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(px_y(fy, yr) + 3) +
               "\" text-anchor=\"end\" font-size=\"10\">" + num(fy) + "</text>\n";
    }
    return out;
}

std::string document(const std::string& body) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           num(kWidth) + "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) +
           "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body + "</svg>\n";
}

}  // namespace

std::string line_chart(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                       const std::string& y_label) {
    Range xr, yr;
    bool any = false;
    for (const Series& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!any) {
                xr.lo = xr.hi = s.x[i];
                yr.lo = yr.hi = s.y[i];
                any = true;
            }
            xr.expand(s.x[i]);
            yr.expand(s.y[i]);
        }
    xr.pad();
    yr.pad();

    std::string body = chart_frame(title, x_label, y_label, xr, yr);
    std::size_t color = 0;
    double legend_y = kTop + 14;
    for (const Series& s : series) {
        const char* stroke = kPalette[color % (sizeof(kPalette) / sizeof(kPalette[0]))];
        ++color;
        std::string points;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            points += num(px_x(s.x[i], xr)) + "," + num(px_y(s.y[i], yr));
            if (i + 1 < s.x.size()) points.push_back(' ');
        }
        body += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"1.5\" points=\"" +
                points + "\"/>\n";
        body += "<rect x=\"" + num(kWidth - kRight - 150) + "\" y=\"" + num(legend_y - 8) +
                "\" width=\"10\" height=\"10\" fill=\"" + stroke + "\"/>\n";
        body += "<text x=\"" + num(kWidth - kRight - 136) + "\" y=\"" + num(legend_y + 1) +
                "\" font-size=\"11\">" + escape(s.label) + "</text>\n";
        legend_y += 16;
    }
    return document(body);
}

std::string scatter_chart(const std::vector<double>& x, const std::vector<double>& y, const std::string& title,
                          const std::string& x_label, const std::string& y_label) {
    Range r;
    bool any = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!any) {
            r.lo = r.hi = x[i];
            any = true;
        }
        r.expand(x[i]);
        r.expand(y[i]);
    }
    r.pad();

    std::string body = chart_frame(title, x_label, y_label, r, r);
    body += "<line x1=\"" + num(px_x(r.lo, r)) + "\" y1=\"" + num(px_y(r.lo, r)) + "\" x2=\"" +
            num(px_x(r.hi, r)) + "\" y2=\"" + num(px_y(r.hi, r)) +
            "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
    // Cap the emitted points so dense runs stay viewable.
    const std::size_t max_points = 4000;
    const std::size_t stride = x.size() > max_points ? x.size() / max_points : 1;
    for (std::size_t i = 0; i < x.size(); i += stride) {
        body += "<circle cx=\"" + num(px_x(x[i], r)) + "\" cy=\"" + num(px_y(y[i], r)) +
                "\" r=\"2\" fill=\"#1f6fb2\" fill-opacity=\"0.45\"/>\n";
    }
    return document(body);
}

}  // namespace odflow::svg
