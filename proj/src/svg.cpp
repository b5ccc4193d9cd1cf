#include "resobs/svg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "resobs/io.hpp"

namespace resobs {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string num(double v) { return format_double(v, 6); }

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += ch;
        }
    }
    return out;
}

struct Axis {
    double lo;
    double hi;
    double pixel_lo;
    double pixel_hi;

    double map(double v) const {
        if (hi == lo) {
            return 0.5 * (pixel_lo + pixel_hi);
        }
        return pixel_lo + (v - lo) / (hi - lo) * (pixel_hi - pixel_lo);
    }
};

Axis padded(double lo, double hi, double pixel_lo, double pixel_hi) {
    if (lo == hi) {
        const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
        return {lo - pad, hi + pad, pixel_lo, pixel_hi};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad, pixel_lo, pixel_hi};
}

void open_document(std::ostringstream& svg, const std::string& title) {
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
        << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
        << "\" fill=\"white\"/>\n"
        << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << escape(title) << "</text>\n";
}

void draw_axes(std::ostringstream& svg, const Axis& x, const Axis& y, const std::string& x_label,
               const std::string& y_label, bool x_ticks) {
    const double x0 = kLeft;
    const double x1 = kWidth - kRight;
    const double y0 = kHeight - kBottom;
    const double y1 = kTop;
    svg << "<g stroke=\"black\" stroke-width=\"1\">\n"
        << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\""
        << num(y0) << "\"/>\n"
        << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\""
        << num(y1) << "\"/>\n"
        << "</g>\n";
    svg << "<g font-size=\"11\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = y.lo + (y.hi - y.lo) * i / 4.0;
        const double py = y.map(v);
        svg << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(py + 4)
            << "\" text-anchor=\"end\">" << format_double(v, 3) << "</text>\n";
        if (x_ticks) {
            const double xv = x.lo + (x.hi - x.lo) * i / 4.0;
            svg << "<text x=\"" << num(x.map(xv)) << "\" y=\"" << num(y0 + 16)
                << "\" text-anchor=\"middle\">" << format_double(xv, 4) << "</text>\n";
        }
    }
    svg << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 16)
        << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n"
        << "<text x=\"16\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << num((y0 + y1) / 2) << ")\">" << escape(y_label) << "</text>\n"
        << "</g>\n";
}

} // namespace

std::string render_sweep_svg(std::span<const SweepRecord> records, const std::string& parameter) {
    std::map<double, std::vector<double>> by_value;
    double x_lo = INFINITY, x_hi = -INFINITY, y_hi = 0.0;
    for (const auto& r : records) {
        x_lo = std::min(x_lo, r.value);
        x_hi = std::max(x_hi, r.value);
        if (r.ok()) {
            by_value[r.value].push_back(r.mse);
            y_hi = std::max(y_hi, r.mse);
        }
    }
    if (records.empty()) {
        x_lo = 0.0;
        x_hi = 1.0;
    }
    const Axis x = padded(x_lo, x_hi, kLeft, kWidth - kRight);
    const Axis y = padded(0.0, y_hi > 0.0 ? y_hi : 1.0, kHeight - kBottom, kTop);

    std::ostringstream svg;
    open_document(svg, "MSE vs " + parameter);
    draw_axes(svg, x, y, parameter, "MSE", true);

    svg << "<g class=\"trials\" fill=\"steelblue\" fill-opacity=\"0.5\">\n";
    for (const auto& r : records) {
        if (!r.ok()) {
            continue;
        }
        svg << "<circle cx=\"" << num(x.map(r.value)) << "\" cy=\"" << num(y.map(r.mse))
            << "\" r=\"2.5\" data-value=\"" << format_double(r.value) << "\" data-mse=\""
            << format_double(r.mse) << "\"/>\n";
    }
    svg << "</g>\n";

    std::ostringstream path;
    svg << "<g class=\"median\" fill=\"firebrick\">\n";
    bool first = true;
    for (auto& [value, mses] : by_value) {
        const double med = median_finite(mses);
        const double px = x.map(value);
        const double py = y.map(med);
        path << (first ? "M" : " L") << num(px) << ' ' << num(py);
        first = false;
        svg << "<rect x=\"" << num(px - 3) << "\" y=\"" << num(py - 3)
            << "\" width=\"6\" height=\"6\" data-value=\"" << format_double(value)
            << "\" data-median=\"" << format_double(med) << "\"/>\n";
    }
    svg << "</g>\n";
    if (!first) {
        svg << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"firebrick\" stroke-width=\"1.5\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string render_comparison_svg(std::span<const ComparisonRecord> records) {
    double y_hi = 0.0;
    for (const auto& r : records) {
        if (std::isfinite(r.median_mse)) {
            y_hi = std::max(y_hi, r.median_mse);
        }
        y_hi = std::max(y_hi, reference_mse(r.kind));
    }
    const Axis y = padded(0.0, y_hi > 0.0 ? y_hi : 1.0, kHeight - kBottom, kTop);
    const Axis x{0.0, static_cast<double>(std::max<std::size_t>(records.size(), 1)), kLeft,
                 kWidth - kRight};

    std::ostringstream svg;
    open_document(svg, "Median MSE per reservoir topology");
    draw_axes(svg, x, y, "topology", "MSE", false);

    const double slot = (x.pixel_hi - x.pixel_lo) / x.hi;
    const double base = y.map(0.0);
    svg << "<g class=\"bars\" font-size=\"11\">\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const double left = x.map(static_cast<double>(i)) + 0.2 * slot;
        const double width = 0.6 * slot;
        const double centre = left + width / 2;
        const std::string name(to_string(r.kind));
        if (std::isfinite(r.median_mse)) {
            const double top = y.map(r.median_mse);
            svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(width)
                << "\" height=\"" << num(base - top) << "\" fill=\"steelblue\" data-topology=\""
                << name << "\" data-median=\"" << format_double(r.median_mse) << "\"/>\n";
        }
        const double ref = reference_mse(r.kind);
        const double ry = y.map(ref);
        svg << "<line x1=\"" << num(left - 4) << "\" y1=\"" << num(ry) << "\" x2=\""
            << num(left + width + 4) << "\" y2=\"" << num(ry)
            << "\" stroke=\"firebrick\" stroke-dasharray=\"4 2\" data-topology=\"" << name
            << "\" data-reference=\"" << format_double(ref) << "\"/>\n"
            << "<text x=\"" << num(centre) << "\" y=\"" << num(ry - 4)
            << "\" text-anchor=\"middle\" fill=\"firebrick\">ref " << format_double(ref, 4)
            << "</text>\n"
            << "<text x=\"" << num(centre) << "\" y=\"" << num(base + 16)
            << "\" text-anchor=\"middle\">" << name << "</text>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

} // namespace resobs
