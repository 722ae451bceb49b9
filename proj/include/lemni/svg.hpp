#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lemni/core.hpp"
#include "lemni/critical.hpp"
#include "lemni/levelset.hpp"

namespace lemni {

struct PlotSpec {
    std::vector<double> levels;      // ln|f| values to draw
    std::optional<Window> window;    // default: auto_window at the top level
    int size_px = 800;               // output width; height follows the aspect ratio
    bool show_critical = false;      // draw black crosses at critical points
    int grid = 512;
    int threads = 0;
};

// Default plot ladder: below-ladder and above-ladder levels, eight evenly
// spaced levels between them, plus every bracket pair.  Levels falling on a
// critical modulus are nudged off it.
std::vector<double> auto_levels(const Instance& inst, const CriticalLadder& ladder,
                                double rel_gap = 0.1);

// Standalone SVG 1.1 document: one polyline group per level (with a legend),
// red dots on the roots, optional black crosses on the critical points.
// Output depends only on (inst, ladder, spec).
std::string render_svg(const Instance& inst, const CriticalLadder& ladder, const PlotSpec& spec);

}  // namespace lemni
