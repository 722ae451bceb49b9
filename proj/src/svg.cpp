#include "lemni/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>

#include "lemni/errors.hpp"

namespace lemni {

namespace {

constexpr double kExclusionBand = 1e-9;

const char* kPalette[] = {
    "#1b6ca8", "#d1495b", "#2e933c", "#8d5a97", "#e08a1e",
    "#3bb2c4", "#6a4c93", "#a23e48", "#4c956c", "#936639",
};
constexpr int kPaletteSize = 10;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double nudged_off_rungs(const CriticalLadder& ladder, double level) {
    for (const auto& p : ladder.points) {
        if (!std::isfinite(p.log_critical_modulus)) continue;
        if (std::abs(level - p.log_critical_modulus) <= kExclusionBand)
            return p.log_critical_modulus + 1e-6;
    }
    return level;
}

}  // namespace

std::vector<double> auto_levels(const Instance& inst, const CriticalLadder& ladder,
                                double rel_gap) {
    (void)inst;
    const BracketSet brackets = bracket_ladder(ladder, rel_gap);
    std::vector<double> levels;
    double lo, hi;
    if (brackets.rungs.empty()) {
        lo = std::log(0.5);
        hi = std::log(1.5);
    } else {
        lo = brackets.rungs.front().log_modulus - 3.0 * brackets.delta;
        hi = brackets.rungs.back().log_modulus + 3.0 * brackets.delta;
    }
    for (int i = 0; i <= 7; ++i) levels.push_back(lo + (hi - lo) * i / 7.0);
    for (const auto& b : brackets.brackets) {
        levels.push_back(b.lo);
        levels.push_back(b.hi);
    }
    for (double& lvl : levels) lvl = nudged_off_rungs(ladder, lvl);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 levels.end());
    return levels;
}

std::string render_svg(const Instance& inst, const CriticalLadder& ladder, const PlotSpec& spec) {
    if (spec.levels.empty()) throw std::invalid_argument("render_svg: at least one level");
    if (spec.size_px < 64) throw std::invalid_argument("render_svg: size_px must be >= 64");

    std::vector<double> levels = spec.levels;
    std::sort(levels.begin(), levels.end());

    Window win;
    if (spec.window) {
        win = *spec.window;
        validate_window(win);
    } else {
        win = auto_window(inst, levels.back(), 0.5, spec.grid);
    }

    FieldGrid field(inst, win, spec.threads);

    const double aspect = (win.y_max - win.y_min) / (win.x_max - win.x_min);
    const int width = spec.size_px;
    const int height = std::max(64, static_cast<int>(std::lround(width * aspect)));
    const double sx = width / (win.x_max - win.x_min);
    const double sy = height / (win.y_max - win.y_min);

    auto px = [&](Complex z) {
        // SVG y grows downward.
        const double x = (z.real() - win.x_min) * sx;
        const double y = height - (z.imag() - win.y_min) * sy;
        return std::pair<double, double>(x, y);
    };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           std::to_string(width) + "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
           std::to_string(width) + " " + std::to_string(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

    for (size_t li = 0; li < levels.size(); ++li) {
        const char* color = kPalette[li % kPaletteSize];
        const std::vector<ContourPolyline> contours = extract_contours(field, levels[li]);
        out += "<g fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.2\" data-level=\"" + fmt(levels[li]) + "\">\n";
        for (const auto& c : contours) {
            out += c.closed ? "<polygon points=\"" : "<polyline points=\"";
            for (size_t i = 0; i < c.vertices.size(); ++i) {
                const auto [x, y] = px(c.vertices[i]);
                if (i) out += ' ';
                out += fmt(x) + "," + fmt(y);
            }
            out += "\"/>\n";
        }
        out += "</g>\n";
    }

    out += "<g fill=\"#cc0000\" stroke=\"none\">\n";
    for (const auto& r : inst.roots()) {
        const auto [x, y] = px(r.location);
        out += "<circle cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"3.5\"><title>root x" +
               std::to_string(r.multiplicity) + "</title></circle>\n";
    }
    out += "</g>\n";

    if (spec.show_critical) {
        out += "<g stroke=\"#000000\" stroke-width=\"1.5\">\n";
        for (const auto& p : ladder.points) {
            const auto [x, y] = px(p.location);
            const double s = 4.0;
            out += "<line x1=\"" + fmt(x - s) + "\" y1=\"" + fmt(y - s) + "\" x2=\"" +
                   fmt(x + s) + "\" y2=\"" + fmt(y + s) + "\"/>\n";
            out += "<line x1=\"" + fmt(x - s) + "\" y1=\"" + fmt(y + s) + "\" x2=\"" +
                   fmt(x + s) + "\" y2=\"" + fmt(y - s) + "\"/>\n";
        }
        out += "</g>\n";
    }

    // Legend: one swatch per level, top-left corner.
    out += "<g font-family=\"monospace\" font-size=\"12\">\n";
    for (size_t li = 0; li < levels.size(); ++li) {
        const double y = 16.0 + 16.0 * li;
        out += "<rect x=\"8\" y=\"" + fmt(y - 9) + "\" width=\"12\" height=\"12\" fill=\"" +
               std::string(kPalette[li % kPaletteSize]) + "\"/>\n";
        out += "<text x=\"26\" y=\"" + fmt(y + 1) + "\" fill=\"#222222\">ln|f| = " +
               fmt(levels[li]) + "</text>\n";
    }
    out += "</g>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace lemni
