#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lemni/critical.hpp"
#include "lemni/errors.hpp"
#include "lemni/levelset.hpp"

using lemni::Complex;
using lemni::ContourPolyline;
using lemni::FieldGrid;
using lemni::Instance;
using lemni::Window;

namespace {

ContourPolyline square(double half, bool closed = true) {
    ContourPolyline p;
    p.vertices = {Complex(-half, -half), Complex(half, -half), Complex(half, half),
                  Complex(-half, half)};
    p.closed = closed;
    return p;
}

int count_closed(const std::vector<ContourPolyline>& cs) {
    int n = 0;
    for (const auto& c : cs) n += c.closed ? 1 : 0;
    return n;
}

}  // namespace

TEST_CASE("window validation") {
    CHECK_THROWS_AS(lemni::validate_window({1, 0, 0, 1, 32, 32}), std::invalid_argument);
    CHECK_THROWS_AS(lemni::validate_window({0, 1, 1, 0, 32, 32}), std::invalid_argument);
    CHECK_THROWS_AS(lemni::validate_window({0, 1, 0, 1, 8, 32}), std::invalid_argument);
    lemni::validate_window({-1, 1, -1, 1, 16, 16});  // no throw
}

TEST_CASE("polygon area and orientation") {
    CHECK(lemni::polygon_area(square(1.0)) == doctest::Approx(4.0));
    ContourPolyline cw = square(1.0);
    std::reverse(cw.vertices.begin(), cw.vertices.end());
    CHECK(lemni::polygon_area(cw) == doctest::Approx(-4.0));
    CHECK_THROWS_AS(lemni::polygon_area(square(1.0, false)), lemni::OpenContour);
}

TEST_CASE("point in polygon") {
    const ContourPolyline sq = square(1.0);
    CHECK(lemni::point_in_polygon(Complex(0, 0), sq));
    CHECK(lemni::point_in_polygon(Complex(0.99, -0.99), sq));
    CHECK_FALSE(lemni::point_in_polygon(Complex(1.5, 0), sq));
    CHECK_FALSE(lemni::point_in_polygon(Complex(0, -2), sq));
    CHECK_THROWS_AS(lemni::point_in_polygon(Complex(0, 0), square(1.0, false)),
                    lemni::OpenContour);
}

TEST_CASE("auto_window keeps the boundary above the level") {
    Instance inst({{Complex(1, 0), 1}, {Complex(-1, 0), 1}});
    const double level = std::log(1.5);
    const Window win = lemni::auto_window(inst, level, 0.5, 64);
    lemni::validate_window(win);
    // All four corners and edge midpoints strictly above the level.
    for (double x : {win.x_min, 0.5 * (win.x_min + win.x_max), win.x_max})
        for (double y : {win.y_min, 0.5 * (win.y_min + win.y_max), win.y_max}) {
            if (x != 0.5 * (win.x_min + win.x_max) || y != 0.5 * (win.y_min + win.y_max))
                CHECK(lemni::log_modulus(inst, Complex(x, y)) > level);
        }
    // Roots are inside.
    CHECK(win.x_min < -1.0);
    CHECK(win.x_max > 1.0);

    CHECK_THROWS_AS(lemni::auto_window(inst, 1e300, 0.5, 64), lemni::WindowOverflow);
}

TEST_CASE("field grid values and thread invariance") {
    Instance inst({{Complex(0.2, -0.3), 2}, {Complex(-0.5, 0.1), 1}});
    const Window win{-2, 2, -2, 2, 33, 17};
    FieldGrid g1(inst, win, 1);
    FieldGrid g4(inst, win, 4);
    for (int iy = 0; iy < win.ny; ++iy)
        for (int ix = 0; ix < win.nx; ++ix) {
            CHECK(g1.at(ix, iy) == lemni::log_modulus(inst, g1.node(ix, iy)));
            CHECK(g1.at(ix, iy) == g4.at(ix, iy));
        }
    CHECK(g1.node(0, 0) == Complex(-2, -2));
    CHECK(g1.node(win.nx - 1, win.ny - 1) == Complex(2, 2));
}

TEST_CASE("two-zero lemniscate: contour count flips across the critical level") {
    Instance inst({{Complex(1, 0), 1}, {Complex(-1, 0), 1}});
    const Window win{-3, 3, -3, 3, 256, 256};
    FieldGrid grid(inst, win);

    const auto below = lemni::extract_contours(grid, std::log(0.5));
    CHECK(count_closed(below) == 2);
    const auto above = lemni::extract_contours(grid, std::log(1.5));
    CHECK(count_closed(above) == 1);

    for (const auto& c : below) {
        REQUIRE(c.closed);
        REQUIRE(c.vertices.size() >= 3);
        // Vertices refined onto the curve, counterclockwise, no repeat.
        for (const auto& v : c.vertices)
            CHECK(std::abs(lemni::log_modulus(inst, v) - std::log(0.5)) <= 1e-10);
        CHECK(lemni::polygon_area(c) > 0.0);
        CHECK(c.vertices.front() != c.vertices.back());
    }
}

TEST_CASE("circle area converges") {
    // Single zero: the level ln r curve is the circle |z| = r.
    Instance inst({{Complex(0, 0), 1}});
    const double r = 0.8;
    for (int grid : {128, 256}) {
        const Window win{-2, 2, -2, 2, grid, grid};
        const auto cs = lemni::extract_contours(inst, win, std::log(r));
        REQUIRE(count_closed(cs) == 1);
        const double area = lemni::polygon_area(cs.front());
        CHECK(area == doctest::Approx(std::numbers::pi * r * r).epsilon(0.01));
    }
}

TEST_CASE("open contours appear when the window cuts the curve") {
    Instance inst({{Complex(0, 0), 1}});
    const Window win{-0.5, 2, -2, 2, 128, 128};  // |z| = 1 leaves through the left edge
    const auto cs = lemni::extract_contours(inst, win, 0.0);
    REQUIRE(!cs.empty());
    int open = 0;
    for (const auto& c : cs) open += c.closed ? 0 : 1;
    CHECK(open >= 1);
}

TEST_CASE("saddle cell at a critical level") {
    // f = z^2 - i has its critical point at 0 with |f(0)| = 1; at level 0 the
    // curve crosses itself there and the cell holding 0 is ambiguous.
    Instance inst({{Complex(std::sqrt(0.5), std::sqrt(0.5)), 1},
                   {Complex(-std::sqrt(0.5), -std::sqrt(0.5)), 1}});
    const lemni::CriticalLadder ladder = lemni::critical_points(inst);
    const Window win{-2, 2, -2, 2, 256, 256};
    FieldGrid grid(inst, win);
    CHECK_THROWS_AS(lemni::extract_contours(grid, 0.0, &ladder), lemni::SaddleAtLevel);
    // Without ladder knowledge the ambiguity resolves by the center sample.
    const auto cs = lemni::extract_contours(grid, 0.0);
    CHECK(count_closed(cs) >= 1);
    // Safely off the critical level nothing throws even with the ladder.
    CHECK(count_closed(lemni::extract_contours(grid, -0.05, &ladder)) == 2);
    CHECK(count_closed(lemni::extract_contours(grid, 0.05, &ladder)) == 1);
}

TEST_CASE("components: membership across the merge") {
    Instance inst({{Complex(1, 0), 1}, {Complex(-1, 0), 1}});
    const lemni::CriticalLadder ladder = lemni::critical_points(inst);
    const Window win{-3, 3, -3, 3, 256, 256};
    FieldGrid grid(inst, win);

    const lemni::LevelTopology below = lemni::components(grid, ladder, std::log(0.5));
    REQUIRE(below.components.size() == 2);
    for (const auto& c : below.components) {
        CHECK(c.outer_contour >= 0);
        CHECK(c.root_indices.size() == 1);
        CHECK(c.critical_indices.empty());  // critical modulus 0 > ln 0.5
    }
    // The two components hold different roots.
    CHECK(below.components[0].root_indices[0] != below.components[1].root_indices[0]);

    const lemni::LevelTopology above = lemni::components(grid, ladder, std::log(1.5));
    REQUIRE(above.components.size() == 1);
    CHECK(above.components[0].root_indices.size() == 2);
    CHECK(above.components[0].critical_indices.size() == 1);

    CHECK_THROWS_AS(lemni::components(grid, ladder, 1e-12), lemni::LevelTooCritical);
}

TEST_CASE("orphan root on a too-coarse grid") {
    Instance inst({{Complex(1, 0), 1}, {Complex(-1, 0), 1}});
    const lemni::CriticalLadder ladder = lemni::critical_points(inst);
    // Sublevel disks of radius ~0.03 around +-1 fall between nodes at 16x16.
    const Window win{-3, 3, -3, 3, 16, 16};
    CHECK_THROWS_AS(lemni::components(inst, ladder, win, std::log(0.03)), lemni::OrphanRoot);
}

TEST_CASE("multiplicity weighting flows into the topology") {
    // f = z^2 (z - 2): double root at 0 and simple root at 2.
    Instance inst({{Complex(0, 0), 2}, {Complex(2, 0), 1}});
    const lemni::CriticalLadder ladder = lemni::critical_points(inst);
    const Window win{-4, 6, -5, 5, 512, 512};
    FieldGrid grid(inst, win);

    // Low level: two separate components; the one at 0 already contains the
    // multiplicity-1 critical point sitting on the double root.
    const lemni::LevelTopology topo = lemni::components(grid, ladder, std::log(0.2));
    REQUIRE(topo.components.size() == 2);
    int with_double = -1;
    for (size_t k = 0; k < topo.components.size(); ++k) {
        const auto& c = topo.components[k];
        REQUIRE(c.root_indices.size() == 1);
        if (topo.root_multiplicities[c.root_indices[0]] == 2)
            with_double = static_cast<int>(k);
    }
    REQUIRE(with_double >= 0);
    const auto& dc = topo.components[with_double];
    REQUIRE(dc.critical_indices.size() == 1);
    CHECK(topo.critical_multiplicities[dc.critical_indices[0]] == 1);
}
