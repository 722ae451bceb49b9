#pragma once

#include <vector>

#include "lemni/core.hpp"
#include "lemni/critical.hpp"

namespace lemni {

// Rectangular sampling window.  nx/ny are node counts per axis (>= 16).
struct Window {
    double x_min = 0.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;
    int nx = 0, ny = 0;
};

void validate_window(const Window& win);

// Piece of the level curve ln|f| = level.  Closed polylines do not repeat the
// first vertex and are oriented counterclockwise; open polylines end on the
// window edge.
struct ContourPolyline {
    std::vector<Complex> vertices;
    bool closed = false;
    double level = 0.0;
};

// Signed area (shoelace); positive for counterclockwise.  Closed input only.
double polygon_area(const ContourPolyline& poly);

// Is p strictly inside the closed polyline (nonzero winding)?  Throws
// OpenContour for open input.
bool point_in_polygon(Complex p, const ContourPolyline& poly);

// One connected sublevel region.
struct Component {
    int outer_contour = -1;            // index into LevelTopology::contours; -1 if unbounded
    std::vector<int> root_indices;     // into Instance::roots()
    std::vector<int> critical_indices; // into CriticalLadder::points
    Complex seed;                      // a grid node inside the region
};

struct LevelTopology {
    double level = 0.0;
    std::vector<ContourPolyline> contours;
    std::vector<Component> components;
    std::vector<int> root_multiplicities;      // copied from the instance, same order
    std::vector<int> critical_multiplicities;  // copied from the ladder, same order
};

// Window that contains the root bounding box expanded by
// exp(level/degree) + max pairwise root distance + margin, with the guarantee
// (checked by sampling) that ln|f| > level everywhere on the window edge.
// The margin is doubled up to three times before WindowOverflow is thrown.
Window auto_window(const Instance& inst, double level, double margin, int grid = 512);

// ln|f| sampled over a window.  One grid serves every level at or below the
// level the window was built for, so callers sweeping a ladder reuse it.
class FieldGrid {
public:
    FieldGrid(Instance inst, const Window& win, int threads = 0);

    const Window& window() const { return win_; }
    const Instance& instance() const { return inst_; }
    double at(int ix, int iy) const { return values_[static_cast<size_t>(iy) * win_.nx + ix]; }
    Complex node(int ix, int iy) const;
    double dx() const;
    double dy() const;

private:
    Instance inst_;
    Window win_;
    std::vector<double> values_;
};

// Marching squares on ln|f| with vertex bisection down to |ln|f| - level| <=
// 1e-10.  Ambiguous saddle cells are resolved by the cell-center sample; if a
// ladder is supplied and the level sits within 1e-9 of a critical modulus,
// an ambiguous cell raises SaddleAtLevel instead.
std::vector<ContourPolyline> extract_contours(const FieldGrid& grid, double level,
                                              const CriticalLadder* crit = nullptr);
std::vector<ContourPolyline> extract_contours(const Instance& inst, const Window& win,
                                              double level, const CriticalLadder* crit = nullptr);

// Full topology of the sublevel set {ln|f| < level}: flood-filled connected
// components, each with its outer contour and its roots and critical points
// (assigned by point-in-polygon winding tests).  The level must stay 1e-9
// away from every critical modulus (LevelTooCritical otherwise); a sublevel
// root that lands in no closed contour raises OrphanRoot (grid too coarse).
LevelTopology components(const FieldGrid& grid, const CriticalLadder& crit, double level);
LevelTopology components(const Instance& inst, const CriticalLadder& crit, const Window& win,
                         double level);

}  // namespace lemni
