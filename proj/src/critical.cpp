#include "lemni/critical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lemni/errors.hpp"
#include "lemni/generator.hpp"

namespace lemni {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kResidualTolFactor = 1e-9;
constexpr double kTieTol = 1e-12;
constexpr double kBracketFloor = 1e-6;
constexpr int kIterationCap = 500;

// Monic polynomial with the given zeros, ascending coefficients.
std::vector<Complex> monic_from_roots(const std::vector<Complex>& zeros) {
    std::vector<Complex> c{1.0};
    for (const Complex& r : zeros) {
        c.push_back(c.back());
        for (size_t j = c.size() - 2; j > 0; --j) c[j] = c[j - 1] - r * c[j];
        c[0] = -r * c[0];
    }
    return c;
}

// Exact quotient p / (z - r) for monic p (remainder is ignored).
std::vector<Complex> deflate(const std::vector<Complex>& p, Complex r) {
    const size_t n = p.size() - 1;  // degree
    std::vector<Complex> q(n);
    q[n - 1] = p[n];
    for (size_t j = n - 1; j > 0; --j) q[j - 1] = p[j] + r * q[j];
    return q;
}

// p(x) and p'(x) by Horner.
void horner(const std::vector<Complex>& p, Complex x, Complex& value, Complex& deriv) {
    Complex v = 0.0, d = 0.0;
    for (size_t j = p.size(); j-- > 0;) {
        d = d * x + v;
        v = v * x + p[j];
    }
    value = v;
    deriv = d;
}

struct Rational {
    Complex R;   // f'/f
    Complex Rp;  // (f'/f)'
    bool singular = false;
};

Rational eval_logder(const Instance& inst, Complex z) {
    Rational out;
    Complex R = 0.0, Rp = 0.0;
    for (const auto& r : inst.roots()) {
        const Complex w = z - r.location;
        if (std::norm(w) == 0.0) {
            out.singular = true;
            return out;
        }
        const Complex inv = 1.0 / w;
        R += static_cast<double>(r.multiplicity) * inv;
        Rp -= static_cast<double>(r.multiplicity) * inv * inv;
    }
    out.R = R;
    out.Rp = Rp;
    return out;
}

// |f'(z)| through log space: ln|f'| = ln|f| + ln|f'/f|.
double residual_at(const Instance& inst, Complex z) {
    const Rational q = eval_logder(inst, z);
    if (q.singular) return std::numeric_limits<double>::infinity();
    const double lm = log_modulus(inst, z) + std::log(std::abs(q.R));
    return std::exp(lm);  // underflows to 0 for genuinely converged points
}

// Simultaneous iteration on the numerator polynomial.  Initial guesses sit on
// a circle of radius 1.1 * max root modulus with a phase drawn from the
// instance hash, so reruns are deterministic but symmetric configurations
// still break their ties.
std::vector<Complex> solve_simultaneous(const std::vector<Complex>& poly, const Instance& inst) {
    const int n = static_cast<int>(poly.size()) - 1;
    std::vector<Complex> x(n);
    if (n == 0) return x;

    const double radius = 1.1 * std::max(inst.max_root_modulus(), 1e-3);
    SplitMix64 rng{inst.hash()};
    const double phase = rng.next_unit() * 2.0 * std::numbers::pi;
    for (int i = 0; i < n; ++i) {
        const double a = phase + 2.0 * std::numbers::pi * i / n;
        x[i] = radius * Complex(std::cos(a), std::sin(a));
    }

    for (int iter = 0; iter < kIterationCap; ++iter) {
        double worst_step = 0.0;
        for (int i = 0; i < n; ++i) {
            Complex p, dp;
            horner(poly, x[i], p, dp);
            if (std::norm(p) == 0.0) continue;
            if (std::norm(dp) == 0.0) {
                x[i] += radius * 1e-9;  // off the derivative zero, retry next sweep
                worst_step = std::numeric_limits<double>::infinity();
                continue;
            }
            const Complex w = p / dp;
            Complex s = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const Complex d = x[i] - x[j];
                if (std::norm(d) == 0.0) {
                    s += 1e12;  // coincident guesses repel hard
                    continue;
                }
                s += 1.0 / d;
            }
            const Complex denom = 1.0 - w * s;
            const Complex corr = (std::norm(denom) == 0.0) ? w : w / denom;
            x[i] -= corr;
            worst_step = std::max(worst_step, std::abs(corr) / (1.0 + std::abs(x[i])));
        }
        if (worst_step <= 1e-14) break;
    }
    return x;
}

// Newton on f' via the rational form: f'/f'' = R / (R^2 + R'), so f itself
// never has to be evaluated.  `order` > 1 applies the multiple-zero step.
Complex polish_newton(const Instance& inst, Complex x, int order, int max_iter) {
    for (int iter = 0; iter < max_iter; ++iter) {
        const Rational q = eval_logder(inst, x);
        if (q.singular) break;
        const Complex denom = q.R * q.R + q.Rp;
        if (std::norm(denom) == 0.0) break;
        const Complex step = static_cast<double>(order) * q.R / denom;
        if (!is_finite(step)) break;
        x -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) break;
    }
    return x;
}

}  // namespace

CriticalLadder critical_points(const Instance& inst) {
    const auto& roots = inst.roots();
    const int k = inst.distinct_count();
    const int degree = inst.degree();
    const double maxmod = inst.max_root_modulus();
    const double residual_tol =
        kResidualTolFactor * std::pow(std::max(1.0, maxmod), degree - 1);

    std::vector<CriticalPoint> pts;

    // A multiplicity-m root is itself a critical point of order m-1; |f'| is
    // exactly zero there and the level curve through it degenerates to the
    // -inf sentinel.
    for (const auto& r : roots) {
        if (r.multiplicity >= 2)
            pts.push_back({r.location, r.multiplicity - 1, kNegInf, 0.0});
    }

    if (k >= 2) {
        // Numerator of f'/f = sum_l mult_l / (z - loc_l) over the distinct
        // roots: degree k-1, leading coefficient = total degree.
        std::vector<Complex> locs(k);
        for (int i = 0; i < k; ++i) locs[i] = roots[i].location;
        const std::vector<Complex> P = monic_from_roots(locs);
        std::vector<Complex> num(k, 0.0);
        for (int l = 0; l < k; ++l) {
            const std::vector<Complex> q = deflate(P, locs[l]);
            for (int j = 0; j < k; ++j)
                num[j] += static_cast<double>(roots[l].multiplicity) * q[j];
        }

        std::vector<Complex> cand = solve_simultaneous(num, inst);
        for (Complex& c : cand) c = polish_newton(inst, c, 1, 8);

        // Cluster candidates that converged to the same higher-order zero of
        // f'.  Newton stalls at ~sqrt(eps) from a double zero, so converged
        // members sit well inside the merge radius while genuinely distinct
        // critical points stay far outside it.
        const double merge_radius = 1e-6 * std::max(1.0, maxmod);
        const int n = static_cast<int>(cand.size());
        std::vector<int> parent(n);
        for (int i = 0; i < n; ++i) parent[i] = i;
        std::function<int(int)> find = [&](int i) {
            while (parent[i] != i) i = parent[i] = parent[parent[i]];
            return i;
        };
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (std::abs(cand[i] - cand[j]) <= merge_radius) parent[find(i)] = find(j);

        std::vector<std::vector<int>> clusters;
        {
            std::vector<int> head(n, -1);
            for (int i = 0; i < n; ++i) {
                const int r = find(i);
                if (head[r] < 0) {
                    head[r] = static_cast<int>(clusters.size());
                    clusters.emplace_back();
                }
                clusters[head[r]].push_back(i);
            }
        }

        double worst = 0.0;
        for (const auto& cluster : clusters) {
            const int m = static_cast<int>(cluster.size());
            bool emitted = false;
            if (m >= 2) {
                Complex centroid = 0.0;
                for (int i : cluster) centroid += cand[i];
                centroid /= static_cast<double>(m);
                const Complex refined = polish_newton(inst, centroid, m, 60);
                const double res = residual_at(inst, refined);
                // Accept the merged zero only on a clearly better residual
                // than the simple tolerance; otherwise the cluster was a pair
                // of near-but-distinct critical points.
                if (res <= 1e-12 * std::pow(std::max(1.0, maxmod), degree - 1)) {
                    pts.push_back({refined, m, log_modulus(inst, refined), res});
                    worst = std::max(worst, res);
                    emitted = true;
                }
            }
            if (!emitted) {
                for (int i : cluster) {
                    const double res = residual_at(inst, cand[i]);
                    pts.push_back({cand[i], 1, log_modulus(inst, cand[i]), res});
                    worst = std::max(worst, res);
                }
            }
        }
        if (worst > residual_tol)
            throw SolverNoConvergence(
                "critical_points: residual " + std::to_string(worst) + " above tolerance " +
                    std::to_string(residual_tol) + " after iteration cap",
                worst);
    }

    std::sort(pts.begin(), pts.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.log_critical_modulus != b.log_critical_modulus)
            return a.log_critical_modulus < b.log_critical_modulus;
        if (a.location.real() != b.location.real())
            return a.location.real() < b.location.real();
        return a.location.imag() < b.location.imag();
    });

    CriticalLadder ladder;
    ladder.points = std::move(pts);
    ladder.total_multiplicity = 0;
    for (const auto& p : ladder.points) ladder.total_multiplicity += p.multiplicity;
    if (ladder.total_multiplicity != degree - 1)
        throw SolverNoConvergence(
            "critical_points: recovered multiplicity " +
                std::to_string(ladder.total_multiplicity) + " != degree-1 = " +
                std::to_string(degree - 1),
            std::numeric_limits<double>::infinity());
    return ladder;
}

BracketSet bracket_ladder(const CriticalLadder& ladder, double rel_gap) {
    if (!(rel_gap > 0.0 && rel_gap < 0.5))
        throw std::invalid_argument("bracket_ladder: rel_gap must be in (0, 0.5)");

    BracketSet out;

    // Group finite moduli into rungs; consecutive points within 1e-12 share one.
    std::vector<int> order;
    for (size_t i = 0; i < ladder.points.size(); ++i)
        if (std::isfinite(ladder.points[i].log_critical_modulus))
            order.push_back(static_cast<int>(i));
    // ladder.points are already sorted ascending; finite ones keep that order.
    for (int idx : order) {
        const double v = ladder.points[idx].log_critical_modulus;
        if (!out.rungs.empty() && v - out.rungs.back().log_modulus <= kTieTol) {
            out.rungs.back().point_indices.push_back(idx);
            out.rungs.back().merge_multiplicity += ladder.points[idx].multiplicity;
        } else {
            Rung r;
            r.log_modulus = v;
            r.merge_multiplicity = ladder.points[idx].multiplicity;
            r.point_indices.push_back(idx);
            out.rungs.push_back(std::move(r));
        }
    }
    for (auto& r : out.rungs) r.tied = r.point_indices.size() >= 2;

    // Bracket half-width: a fraction of the smallest rung spacing, floored at
    // 1e-6 — but the floor never wins if it would let a bracket reach the
    // neighbouring rung.  A single-rung ladder has no spacing; a fixed
    // reference of 0.2 keeps its bracket narrow (width 0.04 at rel_gap 0.1).
    double spacing = 0.2;
    if (out.rungs.size() >= 2) {
        spacing = std::numeric_limits<double>::infinity();
        for (size_t i = 1; i < out.rungs.size(); ++i)
            spacing = std::min(spacing, out.rungs[i].log_modulus - out.rungs[i - 1].log_modulus);
    }
    double delta = std::max(kBracketFloor, rel_gap * spacing);
    if (out.rungs.size() >= 2 && delta > 0.49 * spacing) delta = 0.49 * spacing;
    out.delta = delta;

    for (const auto& r : out.rungs) {
        if (r.tied) continue;
        out.brackets.push_back({r.log_modulus - delta, r.log_modulus + delta, r.log_modulus,
                                r.merge_multiplicity});
    }
    return out;
}

std::vector<LevelBracket> merge_brackets(const CriticalLadder& ladder, double rel_gap) {
    BracketSet set = bracket_ladder(ladder, rel_gap);
    std::vector<double> tied;
    for (const auto& r : set.rungs)
        if (r.tied)
            for (int pi : r.point_indices) tied.push_back(ladder.points[pi].log_critical_modulus);
    if (!tied.empty()) {
        std::string msg = "merge_brackets: tied critical moduli at";
        for (double v : tied) msg += " " + std::to_string(v);
        throw DegenerateLadder(msg, std::move(tied));
    }
    return set.brackets;
}

bool roots_hull_contains(const Instance& inst, Complex p, double margin) {
    std::vector<Complex> pts;
    for (const auto& r : inst.roots()) pts.push_back(r.location);
    std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    auto cross = [](Complex o, Complex a, Complex b) {
        return (a.real() - o.real()) * (b.imag() - o.imag()) -
               (a.imag() - o.imag()) * (b.real() - o.real());
    };
    auto seg_dist = [](Complex p_, Complex a, Complex b) {
        const Complex ab = b - a;
        const double len2 = std::norm(ab);
        if (len2 == 0.0) return std::abs(p_ - a);
        double t = ((p_.real() - a.real()) * ab.real() + (p_.imag() - a.imag()) * ab.imag()) / len2;
        t = std::clamp(t, 0.0, 1.0);
        return std::abs(p_ - (a + t * ab));
    };

    if (pts.size() == 1) return std::abs(p - pts[0]) <= margin;

    // Andrew monotone chain; strictly convex (collinear points dropped).
    std::vector<Complex> hull(2 * pts.size());
    size_t h = 0;
    for (const Complex& q : pts) {
        while (h >= 2 && cross(hull[h - 2], hull[h - 1], q) <= 0.0) --h;
        hull[h++] = q;
    }
    const size_t lower = h + 1;
    for (size_t i = pts.size() - 1; i-- > 0;) {
        const Complex q = pts[i];
        while (h >= lower && cross(hull[h - 2], hull[h - 1], q) <= 0.0) --h;
        hull[h++] = q;
    }
    hull.resize(h - 1);

    if (hull.size() <= 2) {
        // Collinear roots: the hull is a segment (critical points lie on it).
        Complex a = pts.front(), b = pts.front();
        for (const Complex& q : pts) {
            if (std::abs(q - a) > std::abs(b - a)) b = q;
        }
        for (const Complex& q : pts) {
            if (std::abs(q - b) > std::abs(a - b)) a = q;
        }
        return seg_dist(p, a, b) <= margin;
    }

    for (size_t i = 0; i < hull.size(); ++i) {
        const Complex a = hull[i];
        const Complex b = hull[(i + 1) % hull.size()];
        const double c = cross(a, b, p);
        if (c < -margin * std::abs(b - a)) return false;
    }
    return true;
}

}  // namespace lemni
