#include "lemni/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

#include "lemni/errors.hpp"
#include "lemni/threads.hpp"

namespace lemni {

namespace {

constexpr double kVertexTol = 1e-10;   // |ln|f| - level| target for refined vertices
constexpr int kBisectionCap = 60;
constexpr double kExclusionBand = 1e-9;  // keep-away distance from critical moduli
constexpr double kEdgeNudge = 1e-9;      // shift applied when a query point grazes an edge

bool near_critical(const CriticalLadder& crit, double level, double band = kExclusionBand) {
    for (const auto& p : crit.points) {
        if (!std::isfinite(p.log_critical_modulus)) continue;
        if (std::abs(level - p.log_critical_modulus) <= band) return true;
    }
    return false;
}

}  // namespace

void validate_window(const Window& win) {
    if (!(win.x_min < win.x_max) || !(win.y_min < win.y_max))
        throw std::invalid_argument("Window: min must be below max on both axes");
    if (win.nx < 16 || win.ny < 16)
        throw std::invalid_argument("Window: at least 16 nodes per axis required");
    if (!std::isfinite(win.x_min) || !std::isfinite(win.x_max) || !std::isfinite(win.y_min) ||
        !std::isfinite(win.y_max))
        throw std::invalid_argument("Window: non-finite bounds");
}

double polygon_area(const ContourPolyline& poly) {
    if (!poly.closed) throw OpenContour("polygon_area: closed contour required");
    const auto& v = poly.vertices;
    double acc = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        const Complex a = v[i];
        const Complex b = v[(i + 1) % v.size()];
        acc += a.real() * b.imag() - b.real() * a.imag();
    }
    return 0.5 * acc;
}

bool point_in_polygon(Complex p, const ContourPolyline& poly) {
    if (!poly.closed) throw OpenContour("point_in_polygon: closed contour required");
    const auto& v = poly.vertices;
    auto is_left = [](Complex a, Complex b, Complex q) {
        return (b.real() - a.real()) * (q.imag() - a.imag()) -
               (q.real() - a.real()) * (b.imag() - a.imag());
    };
    int wn = 0;
    for (size_t i = 0; i < v.size(); ++i) {
        const Complex a = v[i];
        const Complex b = v[(i + 1) % v.size()];
        if (a.imag() <= p.imag()) {
            if (b.imag() > p.imag() && is_left(a, b, p) > 0.0) ++wn;
        } else {
            if (b.imag() <= p.imag() && is_left(a, b, p) < 0.0) --wn;
        }
    }
    return wn != 0;
}

Window auto_window(const Instance& inst, double level, double margin, int grid) {
    if (!std::isfinite(level)) throw std::invalid_argument("auto_window: level must be finite");
    if (!(margin >= 0.0)) throw std::invalid_argument("auto_window: margin must be >= 0");
    if (grid < 16) throw std::invalid_argument("auto_window: grid must be >= 16");

    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& r : inst.roots()) {
        x_lo = std::min(x_lo, r.location.real());
        x_hi = std::max(x_hi, r.location.real());
        y_lo = std::min(y_lo, r.location.imag());
        y_hi = std::max(y_hi, r.location.imag());
    }

    // Far from the roots ln|f| ~ degree * ln(distance), so the level curve fits
    // inside radius exp(level/degree) around any root once the mutual spread is
    // added on top.
    const double reach = std::exp(level / inst.degree()) + inst.max_pairwise_distance();
    if (!std::isfinite(reach))
        throw WindowOverflow("auto_window: level too high for a finite window");

    for (int attempt = 0; attempt <= 3; ++attempt) {
        const double pad =
            reach + (attempt == 0 ? margin : std::max(margin, 0.5) * double(1 << attempt));
        Window win{x_lo - pad, x_hi + pad, y_lo - pad, y_hi + pad, grid, grid};
        if (!std::isfinite(win.x_min) || !std::isfinite(win.x_max) ||
            !std::isfinite(win.y_min) || !std::isfinite(win.y_max))
            throw WindowOverflow("auto_window: window bounds overflow");
        // Boundary assertion: ln|f| must exceed the level everywhere on the rim.
        const int samples = 2 * std::max(win.nx, win.ny);
        bool ok = true;
        for (int s = 0; s <= samples && ok; ++s) {
            const double t = static_cast<double>(s) / samples;
            const double x = win.x_min + t * (win.x_max - win.x_min);
            const double y = win.y_min + t * (win.y_max - win.y_min);
            ok = log_modulus(inst, Complex(x, win.y_min)) > level &&
                 log_modulus(inst, Complex(x, win.y_max)) > level &&
                 log_modulus(inst, Complex(win.x_min, y)) > level &&
                 log_modulus(inst, Complex(win.x_max, y)) > level;
        }
        if (ok) return win;
    }
    throw WindowOverflow("auto_window: boundary still reaches level after 3 margin doublings");
}

FieldGrid::FieldGrid(Instance inst, const Window& win, int threads)
    : inst_(std::move(inst)), win_(win) {
    validate_window(win_);
    values_.resize(static_cast<size_t>(win_.nx) * win_.ny);
    const int workers = resolve_thread_count(threads);
    const double dx_ = (win_.x_max - win_.x_min) / (win_.nx - 1);
    const double dy_ = (win_.y_max - win_.y_min) / (win_.ny - 1);
    // Row-partitioned fill; every node value is independent, so the result is
    // bit-identical at any worker count.
    parallel_for(win_.ny, workers, [&](int iy) {
        const double y = win_.y_min + iy * dy_;
        double* row = values_.data() + static_cast<size_t>(iy) * win_.nx;
        for (int ix = 0; ix < win_.nx; ++ix) {
            row[ix] = log_modulus(inst_, Complex(win_.x_min + ix * dx_, y));
        }
    });
}

Complex FieldGrid::node(int ix, int iy) const {
    return Complex(win_.x_min + ix * dx(), win_.y_min + iy * dy());
}

double FieldGrid::dx() const { return (win_.x_max - win_.x_min) / (win_.nx - 1); }
double FieldGrid::dy() const { return (win_.y_max - win_.y_min) / (win_.ny - 1); }

namespace {

struct RawExtraction {
    std::vector<ContourPolyline> contours;
    std::vector<int> inside_node;  // one sublevel grid node per contour
};

// Crossing vertex on the grid edge (a,b), where exactly one endpoint is
// sublevel: bisection until the sampled value meets kVertexTol.
Complex refine_crossing(const Instance& inst, Complex pa, double va, Complex pb, double vb,
                        double level) {
    Complex lo = pa, hi = pb;
    if (va >= level) std::swap(lo, hi);  // lo is the sublevel side
    Complex mid = 0.5 * (lo + hi);
    for (int it = 0; it < kBisectionCap; ++it) {
        mid = 0.5 * (lo + hi);
        const double vm = log_modulus(inst, mid);
        if (std::abs(vm - level) <= kVertexTol) return mid;
        if (vm < level)
            lo = mid;
        else
            hi = mid;
    }
    (void)va;
    (void)vb;
    return mid;
}

// Marching squares cell cases.  Corner bits: 1=BL, 2=BR, 4=TR, 8=TL (bit set
// = sublevel).  Edges: 0=bottom, 1=right, 2=top, 3=left.
struct CellSegments {
    int n = 0;
    int e[2][2] = {{0, 0}, {0, 0}};
};

CellSegments cell_segments(int cell_case, bool center_inside) {
    CellSegments s;
    auto add = [&s](int a, int b) {
        s.e[s.n][0] = a;
        s.e[s.n][1] = b;
        ++s.n;
    };
    switch (cell_case) {
        case 0:
        case 15: break;
        case 1:
        case 14: add(3, 0); break;
        case 2:
        case 13: add(0, 1); break;
        case 3:
        case 12: add(3, 1); break;
        case 4:
        case 11: add(1, 2); break;
        case 6:
        case 9: add(0, 2); break;
        case 7:
        case 8: add(3, 2); break;
        case 5:  // BL+TR sublevel
            if (center_inside) {
                add(0, 1);
                add(2, 3);
            } else {
                add(0, 3);
                add(1, 2);
            }
            break;
        case 10:  // BR+TL sublevel
            if (center_inside) {
                add(0, 3);
                add(1, 2);
            } else {
                add(0, 1);
                add(2, 3);
            }
            break;
        default: break;
    }
    return s;
}

RawExtraction extract_raw(const FieldGrid& g, double level, const CriticalLadder* crit) {
    if (!std::isfinite(level))
        throw std::invalid_argument("extract_contours: level must be finite");
    const Window& win = g.window();
    const int nx = win.nx, ny = win.ny;
    const Instance& inst = g.instance();
    const bool saddle_sensitive = crit != nullptr && near_critical(*crit, level);

    auto inside = [&](int ix, int iy) { return g.at(ix, iy) < level; };

    // Crossing vertices are cached per grid edge so the two cells sharing an
    // edge chain through the identical refined point.
    std::unordered_map<std::int64_t, int> edge_vertex;
    std::vector<Complex> vertices;
    std::vector<int> vertex_inside_node;

    auto edge_key = [nx](int ix, int iy, bool vertical) {
        return (static_cast<std::int64_t>(iy) * nx + ix) * 2 + (vertical ? 1 : 0);
    };
    auto crossing = [&](int ix, int iy, bool vertical) {
        const std::int64_t key = edge_key(ix, iy, vertical);
        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;
        const int jx = vertical ? ix : ix + 1;
        const int jy = vertical ? iy + 1 : iy;
        const double va = g.at(ix, iy), vb = g.at(jx, jy);
        const Complex v = refine_crossing(inst, g.node(ix, iy), va, g.node(jx, jy), vb, level);
        const int id = static_cast<int>(vertices.size());
        vertices.push_back(v);
        vertex_inside_node.push_back(va < level ? iy * nx + ix : jy * nx + jx);
        edge_vertex.emplace(key, id);
        return id;
    };

    // Edge index -> grid edge of the cell at (cx, cy).
    auto cell_edge_vertex = [&](int cx, int cy, int e) {
        switch (e) {
            case 0: return crossing(cx, cy, false);
            case 1: return crossing(cx + 1, cy, true);
            case 2: return crossing(cx, cy + 1, false);
            default: return crossing(cx, cy, true);
        }
    };

    struct Link {
        int to;
        int seg;
    };
    std::vector<std::pair<int, int>> segments;
    std::vector<std::vector<Link>> adj;

    for (int cy = 0; cy < ny - 1; ++cy) {
        for (int cx = 0; cx < nx - 1; ++cx) {
            const int cell_case = (inside(cx, cy) ? 1 : 0) | (inside(cx + 1, cy) ? 2 : 0) |
                                  (inside(cx + 1, cy + 1) ? 4 : 0) | (inside(cx, cy + 1) ? 8 : 0);
            if (cell_case == 0 || cell_case == 15) continue;
            bool center_inside = false;
            if (cell_case == 5 || cell_case == 10) {
                if (saddle_sensitive)
                    throw SaddleAtLevel(
                        "extract_contours: ambiguous cell at a level within 1e-9 of a critical "
                        "modulus; re-bracket the level");
                const Complex center = 0.5 * (g.node(cx, cy) + g.node(cx + 1, cy + 1));
                center_inside = log_modulus(inst, center) < level;
            }
            const CellSegments segs = cell_segments(cell_case, center_inside);
            for (int s = 0; s < segs.n; ++s) {
                const int a = cell_edge_vertex(cx, cy, segs.e[s][0]);
                const int b = cell_edge_vertex(cx, cy, segs.e[s][1]);
                if (a == b) continue;
                const int seg_id = static_cast<int>(segments.size());
                segments.emplace_back(a, b);
                if (adj.size() < vertices.size()) adj.resize(vertices.size());
                adj[a].push_back({b, seg_id});
                adj[b].push_back({a, seg_id});
            }
        }
    }
    if (adj.size() < vertices.size()) adj.resize(vertices.size());

    RawExtraction out;
    std::vector<char> seg_used(segments.size(), 0);

    auto walk = [&](int start) {
        std::vector<int> path{start};
        int cur = start;
        for (;;) {
            int next = -1, via = -1;
            for (const Link& l : adj[cur]) {
                if (!seg_used[l.seg]) {
                    next = l.to;
                    via = l.seg;
                    break;
                }
            }
            if (next < 0) break;
            seg_used[via] = 1;
            path.push_back(next);
            cur = next;
        }
        return path;
    };

    auto emit = [&](const std::vector<int>& path, bool closed) {
        if (closed && path.size() < 3) return;
        if (!closed && path.size() < 2) return;
        ContourPolyline poly;
        poly.level = level;
        poly.closed = closed;
        poly.vertices.reserve(path.size());
        for (int id : path) poly.vertices.push_back(vertices[id]);
        if (closed) {
            // Normalize orientation: counterclockwise.
            double acc = 0.0;
            for (size_t i = 0; i < poly.vertices.size(); ++i) {
                const Complex a = poly.vertices[i];
                const Complex b = poly.vertices[(i + 1) % poly.vertices.size()];
                acc += a.real() * b.imag() - b.real() * a.imag();
            }
            if (acc < 0.0) std::reverse(poly.vertices.begin(), poly.vertices.end());
        }
        out.contours.push_back(std::move(poly));
        out.inside_node.push_back(vertex_inside_node[path.front()]);
    };

    // Open chains start at degree-1 vertices (window-edge crossings) …
    for (size_t v = 0; v < adj.size(); ++v) {
        if (adj[v].size() != 1 || seg_used[adj[v][0].seg]) continue;
        emit(walk(static_cast<int>(v)), false);
    }
    // … the rest are cycles.
    for (size_t v = 0; v < adj.size(); ++v) {
        bool pending = false;
        for (const Link& l : adj[v])
            if (!seg_used[l.seg]) pending = true;
        if (!pending) continue;
        std::vector<int> path = walk(static_cast<int>(v));
        if (path.size() >= 2 && path.front() == path.back()) path.pop_back();
        emit(path, true);
    }
    return out;
}

}  // namespace

std::vector<ContourPolyline> extract_contours(const FieldGrid& grid, double level,
                                              const CriticalLadder* crit) {
    return extract_raw(grid, level, crit).contours;
}

std::vector<ContourPolyline> extract_contours(const Instance& inst, const Window& win,
                                              double level, const CriticalLadder* crit) {
    FieldGrid grid(inst, win);
    return extract_contours(grid, level, crit);
}

LevelTopology components(const FieldGrid& g, const CriticalLadder& crit, double level) {
    if (!std::isfinite(level))
        throw std::invalid_argument("components: level must be finite");
    if (near_critical(crit, level))
        throw LevelTooCritical("components: level within 1e-9 of a critical modulus");

    const Window& win = g.window();
    const int nx = win.nx, ny = win.ny;
    const Instance& inst = g.instance();

    RawExtraction raw = extract_raw(g, level, &crit);

    // Connected components of the sublevel nodes.  4-connectivity, plus the
    // diagonal of an ambiguous cell whose center is sublevel — the same rule
    // marching squares uses, so regions and contours agree.
    std::vector<int> label(static_cast<size_t>(nx) * ny, -1);
    auto inside = [&](int ix, int iy) { return g.at(ix, iy) < level; };
    std::unordered_map<int, char> center_cache;
    auto cell_center_inside = [&](int cx, int cy) {
        const int key = cy * nx + cx;
        auto it = center_cache.find(key);
        if (it != center_cache.end()) return it->second != 0;
        const Complex center = 0.5 * (g.node(cx, cy) + g.node(cx + 1, cy + 1));
        const bool in = log_modulus(inst, center) < level;
        center_cache.emplace(key, in ? 1 : 0);
        return in;
    };
    auto cell_case = [&](int cx, int cy) {
        return (inside(cx, cy) ? 1 : 0) | (inside(cx + 1, cy) ? 2 : 0) |
               (inside(cx + 1, cy + 1) ? 4 : 0) | (inside(cx, cy + 1) ? 8 : 0);
    };
    // Does the ambiguous cell at (cx,cy) join the diagonal through (corner_bits)?
    auto diagonal_joins = [&](int cx, int cy, int expect_case) {
        if (cx < 0 || cy < 0 || cx >= nx - 1 || cy >= ny - 1) return false;
        if (cell_case(cx, cy) != expect_case) return false;
        return cell_center_inside(cx, cy);
    };

    std::vector<Component> comps;
    std::deque<int> queue;
    for (int start = 0; start < nx * ny; ++start) {
        const int sx = start % nx, sy = start / nx;
        if (label[start] >= 0 || !inside(sx, sy)) continue;
        const int id = static_cast<int>(comps.size());
        Component c;
        c.seed = g.node(sx, sy);
        comps.push_back(c);
        label[start] = id;
        queue.push_back(start);
        while (!queue.empty()) {
            const int node = queue.front();
            queue.pop_front();
            const int ix = node % nx, iy = node / nx;
            auto visit = [&](int jx, int jy) {
                if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) return;
                const int j = jy * nx + jx;
                if (label[j] >= 0 || !inside(jx, jy)) return;
                label[j] = id;
                queue.push_back(j);
            };
            if (ix > 0 && inside(ix - 1, iy)) visit(ix - 1, iy);
            if (ix + 1 < nx && inside(ix + 1, iy)) visit(ix + 1, iy);
            if (iy > 0 && inside(ix, iy - 1)) visit(ix, iy - 1);
            if (iy + 1 < ny && inside(ix, iy + 1)) visit(ix, iy + 1);
            // case 5 joins BL-TR; case 10 joins BR-TL.
            if (diagonal_joins(ix, iy, 5)) visit(ix + 1, iy + 1);
            if (diagonal_joins(ix - 1, iy - 1, 5)) visit(ix - 1, iy - 1);
            if (diagonal_joins(ix, iy - 1, 10)) visit(ix + 1, iy - 1);
            if (diagonal_joins(ix - 1, iy, 10)) visit(ix - 1, iy + 1);
        }
    }

    LevelTopology topo;
    topo.level = level;
    topo.contours = std::move(raw.contours);
    topo.components = std::move(comps);
    for (const auto& r : inst.roots()) topo.root_multiplicities.push_back(r.multiplicity);
    for (const auto& p : crit.points) topo.critical_multiplicities.push_back(p.multiplicity);

    // Attach each closed contour to the component of its sublevel side.  Open
    // contours mark their component as unbounded (outer stays -1).
    std::vector<double> outer_area(topo.components.size(), -1.0);
    std::vector<char> unbounded(topo.components.size(), 0);
    for (size_t ci = 0; ci < topo.contours.size(); ++ci) {
        const int comp = label[raw.inside_node[ci]];
        if (comp < 0) continue;  // cannot happen: the inside node is sublevel
        if (!topo.contours[ci].closed) {
            unbounded[comp] = 1;
            continue;
        }
        const double area = std::abs(polygon_area(topo.contours[ci]));
        if (area > outer_area[comp]) {
            outer_area[comp] = area;
            topo.components[comp].outer_contour = static_cast<int>(ci);
        }
    }
    for (size_t k = 0; k < topo.components.size(); ++k)
        if (unbounded[k]) topo.components[k].outer_contour = -1;

    // Point-in-polygon assignment, with the grazing-edge nudge toward the
    // component seed.
    auto locate = [&](Complex p, const char* what, int index) {
        int found = -1;
        for (size_t k = 0; k < topo.components.size(); ++k) {
            const Component& c = topo.components[k];
            if (c.outer_contour < 0) continue;
            const ContourPolyline& poly = topo.contours[c.outer_contour];
            Complex q = p;
            double min_d2 = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < poly.vertices.size(); ++i) {
                const Complex a = poly.vertices[i];
                const Complex b = poly.vertices[(i + 1) % poly.vertices.size()];
                const Complex ab = b - a;
                const double len2 = std::norm(ab);
                double t = len2 == 0.0 ? 0.0
                                       : ((q.real() - a.real()) * ab.real() +
                                          (q.imag() - a.imag()) * ab.imag()) /
                                             len2;
                t = std::clamp(t, 0.0, 1.0);
                min_d2 = std::min(min_d2, std::norm(q - (a + t * ab)));
            }
            if (min_d2 <= 1e-12 * 1e-12) {
                const Complex dir = c.seed - q;
                const double len = std::abs(dir);
                if (len > 0.0) q += (kEdgeNudge / len) * dir;
            }
            if (point_in_polygon(q, poly)) {
                if (found >= 0)
                    throw Error(std::string("components: ") + what +
                                " claimed by two components (overlap)");
                found = static_cast<int>(k);
            }
        }
        if (found < 0)
            throw OrphanRoot(std::string("components: ") + what + " " + std::to_string(index) +
                                 " lies in no closed contour (grid too coarse)",
                             index);
        return found;
    };

    for (size_t i = 0; i < inst.roots().size(); ++i) {
        const int comp = locate(inst.roots()[i].location, "root", static_cast<int>(i));
        topo.components[comp].root_indices.push_back(static_cast<int>(i));
    }
    for (size_t i = 0; i < crit.points.size(); ++i) {
        if (!(crit.points[i].log_critical_modulus < level)) continue;
        const int comp = locate(crit.points[i].location, "critical point", static_cast<int>(i));
        topo.components[comp].critical_indices.push_back(static_cast<int>(i));
    }
    return topo;
}

LevelTopology components(const Instance& inst, const CriticalLadder& crit, const Window& win,
                         double level) {
    FieldGrid grid(inst, win);
    return components(grid, crit, level);
}

}  // namespace lemni
