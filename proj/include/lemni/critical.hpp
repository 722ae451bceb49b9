#pragma once

#include <vector>

#include "lemni/core.hpp"

namespace lemni {

// One zero of f' with the level at which the level-curve topology changes.
struct CriticalPoint {
    Complex location;
    int multiplicity = 1;
    double log_critical_modulus = 0.0;  // ln|f| at the point; -inf when it sits on a multiple root
    double residual = 0.0;              // |f'| at the returned location
};

// All critical points of an instance, sorted by ascending log_critical_modulus
// (-inf entries first).  total_multiplicity always equals degree - 1.
struct CriticalLadder {
    std::vector<CriticalPoint> points;
    int total_multiplicity = 0;
};

// Finds every zero of f' with multiplicity.  Multiple roots contribute their
// location with multiplicity m-1 directly; the remaining critical points are
// the zeros of the numerator of f'/f = sum_l mult_l/(z - loc_l), found by
// simultaneous (Aberth-style) iteration and polished by Newton on f'.
// Throws SolverNoConvergence if any residual misses tolerance after 500
// iterations.
CriticalLadder critical_points(const Instance& inst);

// Interval around one critical modulus guaranteed to contain no other.
struct LevelBracket {
    double lo = 0.0;
    double hi = 0.0;
    double center = 0.0;
    int merge_multiplicity = 1;  // total critical multiplicity at this modulus
};

// Distinct finite critical modulus with the points that share it.
struct Rung {
    double log_modulus = 0.0;
    int merge_multiplicity = 0;
    std::vector<int> point_indices;  // into CriticalLadder::points
    bool tied = false;               // >= 2 distinct points within 1e-12
};

struct BracketSet {
    std::vector<Rung> rungs;             // ascending, all finite moduli
    std::vector<LevelBracket> brackets;  // for untied rungs only, same order
    double delta = 0.0;                  // half-width used for every bracket
};

// Groups the finite critical moduli into rungs (tie tolerance 1e-12) and
// builds a +-delta bracket around each untied rung, where delta is
// rel_gap * (minimum adjacent rung spacing) floored at 1e-6 but never allowed
// to reach another rung.  Ties are reported, not split.
// rel_gap must be in (0, 0.5).
BracketSet bracket_ladder(const CriticalLadder& ladder, double rel_gap);

// Same brackets, but ties are a hard error: throws DegenerateLadder if any
// two distinct critical points share a modulus within 1e-12.
std::vector<LevelBracket> merge_brackets(const CriticalLadder& ladder, double rel_gap);

// Sanity helper: is p inside the convex hull of the roots, within `margin`?
// (Every critical point must be; used as a solver cross-check.)
bool roots_hull_contains(const Instance& inst, Complex p, double margin);

}  // namespace lemni
