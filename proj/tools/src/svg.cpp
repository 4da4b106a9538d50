#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace tsobs::app {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::vector<std::size_t> thin(const Series& s, std::size_t max_points) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    std::vector<std::size_t> idx;
    if (n <= max_points || max_points < 4) {
        for (std::size_t k = 0; k < n; ++k) idx.push_back(k);
        return idx;
    }
    const std::size_t buckets = max_points / 2;
    for (std::size_t b = 0; b < buckets; ++b) {
        const std::size_t lo = b * n / buckets;
        const std::size_t hi = std::max(lo + 1, (b + 1) * n / buckets);
        std::size_t kmin = lo, kmax = lo;
        for (std::size_t k = lo; k < hi; ++k) {
            if (s.y[k] < s.y[kmin]) kmin = k;
            if (s.y[k] > s.y[kmax]) kmax = k;
        }
        idx.push_back(std::min(kmin, kmax));
        if (kmin != kmax) idx.push_back(std::max(kmin, kmax));
    }
    return idx;
}

// Round step of 1, 2 or 5 times a power of ten.
double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

void render_panel(std::ostringstream& os, const Panel& p, double top, int width, int height,
                  std::size_t max_points) {
    const double left = 70, right = 20, ptop = 28, pbottom = 42;
    const double w = width - left - right, h = height - ptop - pbottom;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : p.series) {
        for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
            xmin = std::min(xmin, s.x[k]);
            xmax = std::max(xmax, s.x[k]);
            ymin = std::min(ymin, s.y[k]);
            ymax = std::max(ymax, s.y[k]);
        }
    }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax - ymin < 1e-12 * std::max(1.0, std::abs(ymax))) {
        const double pad = std::max(1e-12, 0.5 * std::abs(ymax));
        ymin -= pad;
        ymax += pad;
    }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;
    const auto X = [&](double v) { return left + (v - xmin) / (xmax - xmin) * w; };
    const auto Y = [&](double v) { return top + ptop + (ymax - v) / (ymax - ymin) * h; };

    os << "<text x=\"" << width / 2 << "\" y=\"" << top + 18
       << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(p.title) << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top + ptop << "\" width=\"" << w << "\" height=\"" << h
       << "\" fill=\"none\" stroke=\"#444\"/>\n";

    const double xs = nice_step(xmax - xmin, 8), ys = nice_step(ymax - ymin, 5);
    for (double v = std::ceil(xmin / xs) * xs; v <= xmax + 1e-9 * xs; v += xs) {
        os << "<line x1=\"" << X(v) << "\" y1=\"" << top + ptop << "\" x2=\"" << X(v) << "\" y2=\""
           << top + ptop + h << "\" stroke=\"#ddd\"/>"
           << "<text x=\"" << X(v) << "\" y=\"" << top + ptop + h + 14
           << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt(std::abs(v) < 1e-12 * xs ? 0.0 : v)
           << "</text>\n";
    }
    for (double v = std::ceil(ymin / ys) * ys; v <= ymax + 1e-9 * ys; v += ys) {
        os << "<line x1=\"" << left << "\" y1=\"" << Y(v) << "\" x2=\"" << left + w << "\" y2=\"" << Y(v)
           << "\" stroke=\"#ddd\"/>"
           << "<text x=\"" << left - 4 << "\" y=\"" << Y(v) + 3
           << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(std::abs(v) < 1e-12 * ys ? 0.0 : v)
           << "</text>\n";
    }
    os << "<text x=\"" << left + w / 2 << "\" y=\"" << top + height - 8
       << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(p.x_label) << "</text>\n";
    os << "<text x=\"14\" y=\"" << top + ptop + h / 2 << "\" text-anchor=\"middle\" font-size=\"11\" "
       << "transform=\"rotate(-90 14 " << top + ptop + h / 2 << ")\">" << escape(p.y_label) << "</text>\n";

    for (std::size_t s = 0; s < p.series.size(); ++s) {
        const auto& series = p.series[s];
        const char* colour = kPalette[s % std::size(kPalette)];
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\""
           << (series.dashed ? " stroke-dasharray=\"6 3\"" : "") << " points=\"";
        for (std::size_t k : thin(series, max_points)) {
            if (!std::isfinite(series.x[k]) || !std::isfinite(series.y[k])) continue;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(series.x[k]), Y(series.y[k]));
            os << buf;
        }
        os << "\"/>\n";
        const double ly = top + ptop + 14 + 14 * static_cast<double>(s);
        os << "<line x1=\"" << left + w - 110 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + w - 90
           << "\" y2=\"" << ly - 4 << "\" stroke=\"" << colour << "\" stroke-width=\"2\""
           << (series.dashed ? " stroke-dasharray=\"6 3\"" : "") << "/>"
           << "<text x=\"" << left + w - 85 << "\" y=\"" << ly << "\" font-size=\"11\">"
           << escape(series.label) << "</text>\n";
    }
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels, int width, int panel_height, std::size_t max_points) {
    std::ostringstream os;
    const int height = panel_height * static_cast<int>(std::max<std::size_t>(panels.size(), 1));
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\" font-family=\"sans-serif\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t k = 0; k < panels.size(); ++k) {
        render_panel(os, panels[k], static_cast<double>(k) * panel_height, width, panel_height, max_points);
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace tsobs::app
