#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "pml/nonlinearity.hpp"
#include "pml/quadrature.hpp"

using namespace pml;

TEST_CASE("plain power nonlinearity") {
    CHECK(phi(2.0, 2.0) == 4.0);
    CHECK(phi(3.0, 2.0) == 9.0);
    CHECK(phi(-2.0, 2.0) == -4.0);   // odd extension
    CHECK(phi(0.0, 2.0) == 0.0);
    CHECK(phi(2.0, 3.0) == 8.0);
    CHECK(phi_prime(2.0, 2.0) == 4.0);
    CHECK(phi_prime(0.0, 2.0) == 0.0);
    CHECK(phi_inverse(9.0, 2.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(phi_inverse(-9.0, 2.0) == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(phi_primitive(2.0, 2.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
    // primitive is even, integrand odd
    CHECK(phi_primitive(-2.0, 2.0) == phi_primitive(2.0, 2.0));
}

TEST_CASE("regularized nonlinearity agrees with the pure power for large s") {
    RegularizedPhi f(2.0, 1);
    CHECK(f.value(1.0) == 1.0);      // exactly at the splice point
    CHECK(f.value(2.0) == 4.0);      // identity region is bit-exact
    CHECK(f.value(137.5) == phi(137.5, 2.0));
    CHECK(f.derivative(2.0) == phi_prime(2.0, 2.0));

    RegularizedPhi g(2.0, 2);
    CHECK(g.value(2.0) == 4.0);      // |s| >= 1/n = 1/2
    CHECK(g.value(0.5) == doctest::Approx(0.25).epsilon(1e-14));

    RegularizedPhi h(3.5, 8);
    for (double s : {0.125, 0.2, 1.0, 5.0})
        CHECK(h.value(s) == phi(s, 3.5));
}

TEST_CASE("linear core with unit slope gives s/n inside the core") {
    // phi_1(s) = c*s on [0, 1/2]; scaled: phi_n(s) = n^{-m} phi_1(n s),
    // so with c_lin = 1 and s <= 1/(2n), m = 2: phi_n(s) = n^{-2} * n s = s/n.
    for (int n : {1, 2, 4, 8, 64}) {
        RegularizedPhi f(2.0, n, 1.0);
        double s = 1.0 / (4.0 * n);
        CHECK(f.value(s) == doctest::Approx(s / n).epsilon(1e-14));
        CHECK(f.derivative(0.0) == doctest::Approx(1.0 / n).epsilon(1e-14));
        CHECK(f.derivative(s) == doctest::Approx(1.0 / n).epsilon(1e-14));
    }
    // derivative at the origin for general c_lin and m: c * n^{1-m}
    RegularizedPhi f(3.0, 4, 0.75);
    CHECK(f.derivative(0.0) == doctest::Approx(0.75 * std::pow(4.0, -2.0)).epsilon(1e-14));
}

TEST_CASE("derivative matches a centered difference of the value") {
    for (double m : {1.5, 2.0, 3.0}) {
        for (int n : {1, 3, 16}) {
            RegularizedPhi f(m, n);
            double delta = 1e-6;
            for (double s = -2.0; s <= 2.0; s += 0.0625) {
                double fd = (f.value(s + delta) - f.value(s - delta)) / (2 * delta);
                CHECK(f.derivative(s) == doctest::Approx(fd).epsilon(5e-8));
            }
        }
    }
}

TEST_CASE("value is C1 across both splice points") {
    for (double m : {1.5, 2.0, 2.5}) {
        RegularizedPhi f(m, 5);
        double eps = 1e-9;
        for (double knot : {0.5 / 5.0, 1.0 / 5.0}) {
            CHECK(std::abs(f.value(knot + eps) - f.value(knot - eps)) <= 1e-7);
            CHECK(std::abs(f.derivative(knot + eps) - f.derivative(knot - eps)) <= 1e-5);
        }
    }
}

TEST_CASE("regularization is strictly increasing and odd") {
    for (double m : {1.3, 2.0, 4.0}) {
        RegularizedPhi f(m, 3);
        double prev = f.value(0.0);
        CHECK(prev == 0.0);
        for (int i = 1; i <= 3000; ++i) {
            double s = 1.5 * i / 3000.0;
            double cur = f.value(s);
            CHECK(cur > prev);
            CHECK(f.value(-s) == -cur);   // odd by construction
            prev = cur;
        }
    }
}

TEST_CASE("uniform closeness to the pure power, improving in n") {
    // both phi_n and phi vanish at 0 and coincide for |s| >= 1/n, and on
    // [0, 1/n] each is bounded by phi(1/n), so the sup gap is <= 2 phi(1/n)
    for (double m : {1.5, 2.0, 3.0}) {
        double prevgap = std::numeric_limits<double>::infinity();
        for (int n : {1, 2, 4, 8, 16, 32}) {
            RegularizedPhi f(m, n);
            double gap = 0.0;
            for (int i = 0; i <= 2000; ++i) {
                double s = 2.0 * i / 2000.0;
                gap = std::max(gap, std::abs(f.value(s) - phi(s, m)));
            }
            CHECK(gap <= 2.0 * phi(1.0 / n, m));
            CHECK(gap <= prevgap + 1e-15);
            prevgap = gap;
        }
    }
}

TEST_CASE("primitive matches quadrature of the value") {
    for (double m : {1.7, 2.0}) {
        for (int n : {2, 7}) {
            RegularizedPhi f(m, n);
            for (double s : {0.04, 0.11, 1.0 / n, 0.5, 1.0, 2.0}) {
                double byquad =
                    integrate([&](double r) { return f.value(r); }, 0.0, s).value;
                CHECK(f.primitive(s) == doctest::Approx(byquad).epsilon(1e-11));
            }
            CHECK(f.primitive(0.0) == 0.0);
            CHECK(f.primitive(-0.7) == f.primitive(0.7));
        }
    }
    // far outside the mollified core the primitive approaches the pure one:
    // the two integrands differ only on [0, 1/n]
    RegularizedPhi f(2.0, 100);
    CHECK(f.primitive(3.0) ==
          doctest::Approx(phi_primitive(3.0, 2.0)).epsilon(1e-5));
}

TEST_CASE("core slopes that break monotonicity are rejected") {
    // the bridge mean slope is 2 - c, so c = 2 with m = 2 leaves no room
    CHECK_THROWS_AS(RegularizedPhi(2.0, 1, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(RegularizedPhi(4.0, 1, 3.9), std::invalid_argument);
    CHECK_NOTHROW(RegularizedPhi(2.0, 1, 1.0));   // reference choice c = 1
    CHECK_NOTHROW(RegularizedPhi(4.0, 1, 0.25));  // small slopes always fine
}

TEST_CASE("constructor validates degeneracy exponent and index") {
    CHECK_THROWS_AS(RegularizedPhi(1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(RegularizedPhi(0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(RegularizedPhi(2.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(RegularizedPhi(2.0, -3), std::invalid_argument);
}

TEST_CASE("scaling identity between indices") {
    // phi_n(s) = n^{-m} phi_1(n s) by definition; check it across the knots
    RegularizedPhi f1(2.0, 1), f6(2.0, 6);
    for (double s : {0.01, 0.05, 1.0 / 12.0, 0.1, 1.0 / 6.0, 0.3}) {
        CHECK(f6.value(s) ==
              doctest::Approx(std::pow(6.0, -2.0) * f1.value(6.0 * s)).epsilon(1e-13));
        // primitive scales with one extra factor of n
        CHECK(f6.primitive(s) ==
              doctest::Approx(std::pow(6.0, -3.0) * f1.primitive(6.0 * s)).epsilon(1e-13));
    }
}
