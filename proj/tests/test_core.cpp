#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "lemni/core.hpp"

using lemni::Complex;
using lemni::Instance;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("construction validates and merges") {
    CHECK_THROWS_AS(Instance({}), std::invalid_argument);
    CHECK_THROWS_AS(Instance({{Complex(0, 0), 0}}), std::invalid_argument);
    CHECK_THROWS_AS(Instance({{Complex(0, 0), -2}}), std::invalid_argument);
    CHECK_THROWS_AS(Instance({{Complex(kInf, 0), 1}}), std::invalid_argument);
    CHECK_THROWS_AS(Instance({{Complex(0, std::nan("")), 1}}), std::invalid_argument);

    Instance merged({{Complex(1, 2), 1}, {Complex(3, 0), 1}, {Complex(1, 2), 2}});
    CHECK(merged.distinct_count() == 2);
    CHECK(merged.degree() == 4);
    CHECK(merged.roots()[0].location == Complex(1, 2));
    CHECK(merged.roots()[0].multiplicity == 3);
}

TEST_CASE("geometry helpers") {
    Instance inst({{Complex(3, 4), 1}, {Complex(0, 0), 2}, {Complex(-1, 0), 1}});
    CHECK(inst.max_root_modulus() == doctest::Approx(5.0));
    CHECK(inst.max_pairwise_distance() == doctest::Approx(std::hypot(4.0, 4.0)));

    Instance single({{Complex(2, 0), 5}});
    CHECK(single.max_pairwise_distance() == 0.0);
}

TEST_CASE("evaluate on z^2 - 1") {
    Instance inst({{Complex(1, 0), 1}, {Complex(-1, 0), 1}});

    auto at2 = lemni::evaluate(inst, Complex(2, 0));
    CHECK(at2.value.real() == doctest::Approx(3.0));
    CHECK(at2.value.imag() == doctest::Approx(0.0));
    CHECK(at2.log_modulus == doctest::Approx(std::log(3.0)));
    // f'/f = 1/(z-1) + 1/(z+1) = 1 + 1/3 at z = 2
    CHECK(at2.log_derivative.real() == doctest::Approx(4.0 / 3.0));
    CHECK_FALSE(at2.at_root);

    auto ati = lemni::evaluate(inst, Complex(0, 1));  // f(i) = i^2 - 1 = -2
    CHECK(ati.value.real() == doctest::Approx(-2.0));
    CHECK(std::abs(ati.value.imag()) < 1e-15);
    CHECK(ati.log_modulus == doctest::Approx(std::log(2.0)));
}

TEST_CASE("evaluate exactly at a root") {
    Instance inst({{Complex(1, 0), 1}, {Complex(-1, 0), 1}});
    auto r = lemni::evaluate(inst, Complex(1, 0));
    CHECK(r.at_root);
    CHECK(r.value == Complex(0, 0));
    CHECK(r.log_modulus == -kInf);
}

TEST_CASE("log_modulus matches evaluate bit for bit") {
    Instance inst({{Complex(0.3, -0.7), 2}, {Complex(-0.25, 0.1), 1}, {Complex(0.9, 0.4), 3}});
    for (double x = -2.0; x <= 2.0; x += 0.37) {
        for (double y = -2.0; y <= 2.0; y += 0.41) {
            const Complex z(x, y);
            CHECK(lemni::log_modulus(inst, z) == lemni::evaluate(inst, z).log_modulus);
        }
    }
}

TEST_CASE("log accumulation stays finite at high degree") {
    Instance inst({{Complex(0, 0), 400}});
    const double lm = lemni::log_modulus(inst, Complex(2, 0));
    CHECK(lm == doctest::Approx(400.0 * std::log(2.0)));
    CHECK(std::isfinite(lm));

    // Point far away: |z - 0|^400 overflows a double, the log must not.
    const double far = lemni::log_modulus(inst, Complex(1e10, 0));
    CHECK(far == doctest::Approx(400.0 * std::log(1e10)));
}

TEST_CASE("derivative_value") {
    Instance inst({{Complex(1, 0), 1}, {Complex(-1, 0), 1}});  // f = z^2 - 1, f' = 2z
    auto d = lemni::derivative_value(inst, Complex(3, 1));
    CHECK(d.real() == doctest::Approx(6.0));
    CHECK(d.imag() == doctest::Approx(2.0));

    // At the simple root z = 1: f' = (1 - (-1)) = 2.
    auto at_simple = lemni::derivative_value(inst, Complex(1, 0));
    CHECK(at_simple.real() == doctest::Approx(2.0));
    CHECK(at_simple.imag() == doctest::Approx(0.0));

    // At a double root the derivative vanishes too.
    Instance dbl({{Complex(1, 0), 2}});
    CHECK(lemni::derivative_value(dbl, Complex(1, 0)) == Complex(0, 0));
}

TEST_CASE("hash and digest stable, order-insensitive after merge, content-sensitive") {
    Instance a({{Complex(1, 0), 1}, {Complex(-1, 0), 1}});
    Instance b({{Complex(1, 0), 1}, {Complex(-1, 0), 1}});
    CHECK(a.hash() == b.hash());
    CHECK(a.digest() == b.digest());
    CHECK(a.digest().size() == 16);

    Instance c({{Complex(1, 0), 1}, {Complex(-1, 0), 2}});
    CHECK(a.digest() != c.digest());

    Instance merged({{Complex(1, 0), 1}, {Complex(1, 0), 1}});
    Instance direct({{Complex(1, 0), 2}});
    CHECK(merged.digest() == direct.digest());
}
