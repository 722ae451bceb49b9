#include "lemni/counting.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lemni/critical.hpp"
#include "lemni/errors.hpp"

namespace lemni {

namespace {

constexpr int kMaxDepth = 18;
constexpr double kProximityTol = 1e-13;  // relative sample-to-zero distance

// Target sample split into a unit phase and a log magnitude, so |f| at high
// degree never overflows a double.
struct PhaseSample {
    Complex unit;     // value / |value|, or 0 when the target vanishes exactly
    double log_mag;   // ln|value|
};

Complex unit_or_zero(Complex w) {
    const double a = std::abs(w);
    return a > 0.0 ? w / a : Complex(0.0, 0.0);
}

PhaseSample sample_target(const Instance& inst, Complex z, Target which) {
    Complex unit(1.0, 0.0);
    double log_mag = 0.0;
    Complex logder(0.0, 0.0);
    bool at_root = false;
    for (const auto& r : inst.roots()) {
        const Complex w = z - r.location;
        const double a2 = std::norm(w);
        if (a2 == 0.0) {
            at_root = true;
            break;
        }
        const Complex u = unit_or_zero(w);
        for (int m = 0; m < r.multiplicity; ++m) unit *= u;
        unit = unit_or_zero(unit);  // renormalize against drift
        log_mag += 0.5 * r.multiplicity *
                   (std::isfinite(a2) ? std::log(a2) : 2.0 * std::log(std::abs(w)));
        logder += static_cast<double>(r.multiplicity) / w;
    }
    if (at_root)
        return {Complex(0.0, 0.0), -std::numeric_limits<double>::infinity()};
    if (which == Target::derivative) {
        const double la = std::abs(logder);
        if (la == 0.0)
            return {Complex(0.0, 0.0), -std::numeric_limits<double>::infinity()};
        unit = unit_or_zero(unit * (logder / la));
        log_mag += std::log(la);
    }
    return {unit, log_mag};
}

struct WeightedZero {
    Complex location;
    int multiplicity;
};

// The zeros of the target: the roots themselves, or — for f' — its full zero
// set (free critical points plus the order-(m-1) zeros under multiple roots).
std::vector<WeightedZero> target_zeros(const Instance& inst, Target which,
                                       const CriticalLadder* derivative_zeros) {
    std::vector<WeightedZero> zeros;
    if (which == Target::function) {
        for (const auto& r : inst.roots()) zeros.push_back({r.location, r.multiplicity});
    } else {
        const CriticalLadder computed =
            derivative_zeros ? CriticalLadder{} : critical_points(inst);
        const CriticalLadder& ladder = derivative_zeros ? *derivative_zeros : computed;
        for (const auto& p : ladder.points) zeros.push_back({p.location, p.multiplicity});
    }
    return zeros;
}

}  // namespace

WindingCount argument_principle_count(const Instance& inst, const ContourPolyline& contour,
                                      Target which, const CriticalLadder* derivative_zeros) {
    if (!contour.closed)
        throw OpenContour("argument_principle_count: closed contour required");
    if (contour.vertices.size() < 3)
        throw std::invalid_argument("argument_principle_count: need at least 3 vertices");

    const std::vector<WeightedZero> zeros = target_zeros(inst, which, derivative_zeros);

    // A sample that lands on (or within floating-point reach of) a zero of the
    // target has no usable phase.
    auto check_sample = [&](Complex z, const PhaseSample& s) {
        if (s.unit == Complex(0.0, 0.0))
            throw ZeroOnContour("argument_principle_count: target vanishes at a sample point");
        for (const auto& zero : zeros) {
            const double scale = std::max({1.0, std::abs(z), std::abs(zero.location)});
            if (std::abs(z - zero.location) <= kProximityTol * scale)
                throw ZeroOnContour(
                    "argument_principle_count: contour passes within numerical reach of a "
                    "zero of the target");
        }
    };

    std::vector<PhaseSample> at_vertex;
    at_vertex.reserve(contour.vertices.size());
    for (const Complex& v : contour.vertices) {
        at_vertex.push_back(sample_target(inst, v, which));
        check_sample(v, at_vertex.back());
    }

    // True phase change over a segment is at most len * sum(m_j / d_j) with
    // d_j the distance from the segment to zero j; below pi the principal
    // value of the sampled increment cannot alias a hidden full turn.
    auto certified = [&](Complex za, Complex zb) {
        const Complex mid = 0.5 * (za + zb);
        const double half = 0.5 * std::abs(zb - za);
        double speed = 0.0;
        for (const auto& zero : zeros) {
            const double d = std::abs(mid - zero.location) - half;
            if (d <= 0.0) return false;  // zero within the segment's reach
            speed += zero.multiplicity / d;
        }
        return 2.0 * half * speed < std::numbers::pi;
    };

    // Phase increment between two unit samples, principal value in (-pi, pi].
    auto delta_arg = [](const PhaseSample& a, const PhaseSample& b) {
        return std::arg(b.unit * std::conj(a.unit));
    };

    double total = 0.0;
    // Midpoint subdivision until each increment is certified below aliasing
    // and observed below pi/2.
    auto accumulate = [&](auto&& self, Complex za, const PhaseSample& sa, Complex zb,
                          const PhaseSample& sb, int depth) -> void {
        const double d = delta_arg(sa, sb);
        if (std::abs(d) < std::numbers::pi / 2.0 && certified(za, zb)) {
            total += d;
            return;
        }
        if (depth >= kMaxDepth)
            throw NonIntegerWinding(
                "argument_principle_count: cannot certify the phase step; a zero of the "
                "target sits too close to the contour",
                std::abs(d));
        const Complex zm = 0.5 * (za + zb);
        const PhaseSample sm = sample_target(inst, zm, which);
        check_sample(zm, sm);
        self(self, za, sa, zm, sm, depth + 1);
        self(self, zm, sm, zb, sb, depth + 1);
    };

    const size_t n = contour.vertices.size();
    for (size_t i = 0; i < n; ++i) {
        const size_t j = (i + 1) % n;
        accumulate(accumulate, contour.vertices[i], at_vertex[i], contour.vertices[j],
                   at_vertex[j], 0);
    }

    const double turns = total / (2.0 * std::numbers::pi);
    const double nearest = std::round(turns);
    const double residual = std::abs(turns - nearest);
    if (residual > 0.25)
        throw NonIntegerWinding("argument_principle_count: winding " + std::to_string(turns) +
                                    " is not close to an integer",
                                residual);
    return {static_cast<int>(nearest), residual};
}

int membership_count(const LevelTopology& topology, int component_index, Target which) {
    if (component_index < 0 ||
        static_cast<size_t>(component_index) >= topology.components.size())
        throw std::invalid_argument("membership_count: component index out of range");
    const Component& c = topology.components[component_index];
    int total = 0;
    if (which == Target::function) {
        for (int i : c.root_indices) total += topology.root_multiplicities[i];
    } else {
        // Every m-fold zero of f is an (m-1)-fold zero of f'; those coincide
        // with the ladder points of multiplicity >= 1 listed per component.
        for (int i : c.critical_indices) total += topology.critical_multiplicities[i];
    }
    return total;
}

}  // namespace lemni
