#include "lemni/core.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace lemni {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln|w| for one factor.  The squared norm avoids a hypot per root (the hot
// path fills whole grids with this); the hypot fallback only matters for
// |w| beyond ~1e154 where norm overflows.
inline double log_abs_term(Complex w) {
    const double n = std::norm(w);
    if (n > 0.0 && std::isfinite(n)) return 0.5 * std::log(n);
    if (n == 0.0) return kNegInf;  // exact root hit (or far below representable)
    return std::log(std::abs(w));
}

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

Instance::Instance(std::vector<RootEntry> roots) {
    if (roots.empty()) throw std::invalid_argument("Instance: at least one root required");
    for (const auto& r : roots) {
        if (!is_finite(r.location))
            throw std::invalid_argument("Instance: non-finite root location");
        if (r.multiplicity < 1)
            throw std::invalid_argument("Instance: multiplicity must be >= 1");
    }
    // Coincident locations are merged into the first occurrence so the stored
    // list is pairwise distinct.
    roots_.reserve(roots.size());
    for (const auto& r : roots) {
        bool merged = false;
        for (auto& have : roots_) {
            if (have.location == r.location) {
                have.multiplicity += r.multiplicity;
                merged = true;
                break;
            }
        }
        if (!merged) roots_.push_back(r);
    }
    degree_ = 0;
    for (const auto& r : roots_) degree_ += r.multiplicity;
}

double Instance::max_root_modulus() const {
    double m = 0.0;
    for (const auto& r : roots_) m = std::max(m, std::abs(r.location));
    return m;
}

double Instance::max_pairwise_distance() const {
    double d = 0.0;
    for (size_t i = 0; i < roots_.size(); ++i)
        for (size_t j = i + 1; j < roots_.size(); ++j)
            d = std::max(d, std::abs(roots_[i].location - roots_[j].location));
    return d;
}

std::uint64_t Instance::hash() const {
    std::uint64_t h = 0x243F6A8885A308D3ull;
    auto feed = [&h](std::uint64_t v) { h = mix64(h ^ (v + 0x9E3779B97F4A7C15ull)); };
    feed(static_cast<std::uint64_t>(degree_));
    for (const auto& r : roots_) {
        feed(std::bit_cast<std::uint64_t>(r.location.real()));
        feed(std::bit_cast<std::uint64_t>(r.location.imag()));
        feed(static_cast<std::uint64_t>(r.multiplicity));
    }
    return h;
}

std::string Instance::digest() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash()));
    return std::string(buf);
}

double log_modulus(const Instance& inst, Complex z) {
    double lm = 0.0;
    for (const auto& r : inst.roots()) lm += r.multiplicity * log_abs_term(z - r.location);
    return lm;
}

EvalResult evaluate(const Instance& inst, Complex z) {
    if (!is_finite(z)) throw std::invalid_argument("evaluate: non-finite point");
    EvalResult out;
    Complex value = 1.0;
    Complex logder = 0.0;
    double lm = 0.0;
    bool at_root = false;
    for (const auto& r : inst.roots()) {
        const Complex w = z - r.location;
        const double term = log_abs_term(w);
        lm += r.multiplicity * term;
        for (int i = 0; i < r.multiplicity; ++i) value *= w;
        if (term == kNegInf)
            at_root = true;
        else
            logder += static_cast<double>(r.multiplicity) / w;
    }
    out.value = value;
    out.log_modulus = lm;
    out.log_derivative = at_root ? Complex(0.0, 0.0) : logder;
    out.at_root = at_root;
    return out;
}

Complex derivative_value(const Instance& inst, Complex z) {
    if (!is_finite(z)) throw std::invalid_argument("derivative_value: non-finite point");
    const auto& roots = inst.roots();
    int hit = -1;
    for (size_t i = 0; i < roots.size(); ++i) {
        if (std::norm(z - roots[i].location) == 0.0) {
            hit = static_cast<int>(i);
            break;
        }
    }
    if (hit < 0) {
        const EvalResult ev = evaluate(inst, z);
        return ev.value * ev.log_derivative;
    }
    if (roots[hit].multiplicity >= 2) return Complex(0.0, 0.0);
    // Simple root: f'(z) is the product over the remaining factors.
    Complex v = 1.0;
    for (size_t l = 0; l < roots.size(); ++l) {
        if (static_cast<int>(l) == hit) continue;
        const Complex w = z - roots[l].location;
        for (int i = 0; i < roots[l].multiplicity; ++i) v *= w;
    }
    return v;
}

}  // namespace lemni
