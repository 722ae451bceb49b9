#pragma once

#include "lemni/core.hpp"
#include "lemni/critical.hpp"
#include "lemni/levelset.hpp"

namespace lemni {

enum class Target { function, derivative };

struct WindingCount {
    int count = 0;
    double integral_residual = 0.0;  // distance of the raw quadrature from the nearest integer
};

// Number of zeros of the target inside a closed contour by the argument
// principle: accumulated phase differences along the polyline, subdivided per
// edge until each increment is observed < pi/2 and certified alias-free by
// the bound  len * sum(mult_j / dist(segment, zero_j)) < pi.  Phases are
// tracked on the unit circle so the magnitude of f never overflows.  For the
// derivative target the zero set is the critical ladder; pass one to skip the
// internal solve.  Throws ZeroOnContour if a sample lands within numerical
// reach of a zero of the target, NonIntegerWinding if a step cannot be
// certified within the depth cap or the quadrature ends more than 0.25 from
// an integer, OpenContour for open input.
WindingCount argument_principle_count(const Instance& inst, const ContourPolyline& contour,
                                      Target which,
                                      const CriticalLadder* derivative_zeros = nullptr);

// Same count from the topology side: multiplicity sum of the roots (or
// critical points) assigned to the component.
int membership_count(const LevelTopology& topology, int component_index, Target which);

}  // namespace lemni
