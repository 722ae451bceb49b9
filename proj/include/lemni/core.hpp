#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace lemni {

using Complex = std::complex<double>;

bool is_finite(Complex z);

// One distinct zero of the product together with its order.
struct RootEntry {
    Complex location;
    int multiplicity = 1;
};

// The function under study, in fully factored form:
//
//     f(z) = prod_l (z - location_l)^multiplicity_l
//
// Construction merges exactly coincident locations (summing multiplicities),
// so the stored roots are pairwise distinct and the representation is unique
// up to ordering.
class Instance {
public:
    explicit Instance(std::vector<RootEntry> roots);

    const std::vector<RootEntry>& roots() const { return roots_; }
    int degree() const { return degree_; }          // sum of multiplicities
    int distinct_count() const { return static_cast<int>(roots_.size()); }
    double max_root_modulus() const;
    double max_pairwise_distance() const;

    // Stable content hash over (degree, roots in stored order); used for
    // deterministic solver seeding and as the report digest.
    std::uint64_t hash() const;
    std::string digest() const;  // 16 hex digits of hash()

private:
    std::vector<RootEntry> roots_;
    int degree_ = 0;
};

// Everything evaluate() knows about f at one point.
struct EvalResult {
    Complex value;           // direct product; may overflow for extreme inputs
    double log_modulus;      // sum_l mult_l * ln|z - loc_l|; -inf exactly at a root
    Complex log_derivative;  // f'(z)/f(z) = sum_l mult_l / (z - loc_l)
    bool at_root = false;    // true iff z hits a root; log_derivative is then meaningless
};

EvalResult evaluate(const Instance& inst, Complex z);

// The log-modulus part of evaluate() alone.  Shares the exact accumulation
// order with evaluate() so the two are bit-identical.
double log_modulus(const Instance& inst, Complex z);

// f'(z).  Off the roots this is value * log_derivative; at a simple root it is
// the product over the remaining factors; at a multiple root it is zero.
Complex derivative_value(const Instance& inst, Complex z);

}  // namespace lemni
