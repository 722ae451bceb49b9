#include "lemni/generator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lemni {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 ix{index};
    return seed ^ ix.next();
}

Instance generate(const GenSpec& spec) {
    if (spec.n_zeros < 1) throw std::invalid_argument("generate: n_zeros must be >= 1");
    double weight_sum = 0.0;
    if (spec.multiplicity_weights) {
        for (double w : *spec.multiplicity_weights) {
            if (!(w >= 0.0)) throw std::invalid_argument("generate: weights must be >= 0");
            weight_sum += w;
        }
        if (weight_sum <= 0.0)
            throw std::invalid_argument("generate: weights must not all be zero");
    }

    SplitMix64 rng{spec.seed};
    const int n = spec.n_zeros;

    // Draw order is pinned: all moduli first, then all arguments, then
    // (only when weights are present) one multiplicity pick per zero.
    std::vector<double> mod(n), arg(n);
    for (int i = 0; i < n; ++i) mod[i] = rng.next_unit();
    for (int i = 0; i < n; ++i) arg[i] = rng.next_unit() * (2.0 * std::numbers::pi);

    std::vector<int> mult(n, 1);
    if (spec.multiplicity_weights) {
        const auto& w = *spec.multiplicity_weights;
        for (int i = 0; i < n; ++i) {
            const double u = rng.next_unit() * weight_sum;
            mult[i] = (u < w[0]) ? 1 : (u < w[0] + w[1]) ? 2 : 3;
        }
    }

    std::vector<RootEntry> roots(n);
    for (int i = 0; i < n; ++i) {
        roots[i].location = Complex(mod[i] * std::cos(arg[i]), mod[i] * std::sin(arg[i]));
        roots[i].multiplicity = mult[i];
    }
    return Instance(std::move(roots));
}

}  // namespace lemni
