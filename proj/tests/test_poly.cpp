#include <doctest.h>

#include <cmath>
#include <random>

#include "godron/poly.hpp"

using namespace godron;

namespace {

Poly2 randomPoly(std::mt19937_64& rng, int deg) {
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    Poly2 p(deg, deg);
    for (int i = 0; i <= deg; ++i)
        for (int j = 0; i + j <= deg; ++j) p.at(i, j) = coef(rng);
    return p;
}

}  // namespace

TEST_CASE("parser: normal form surface") {
    Poly2 p = parseExpression("y^2/2 - x^2*y + x^4");
    auto t = p.terms();
    CHECK(t.size() == 3);
    CHECK(t[{0, 2}] == doctest::Approx(0.5));
    CHECK(t[{2, 1}] == doctest::Approx(-1.0));
    CHECK(t[{4, 0}] == doctest::Approx(1.0));
}

TEST_CASE("parser: zero polynomial") {
    Poly2 p = parseExpression("0");
    CHECK(p.isZero());
    CHECK(p.totalDegree() == -1);
}

TEST_CASE("parser: product expansion") {
    Poly2 p = parseExpression("(x^2-1)*(y^2-1)");
    auto t = p.terms();
    CHECK(t[{2, 2}] == doctest::Approx(1.0));
    CHECK(t[{2, 0}] == doctest::Approx(-1.0));
    CHECK(t[{0, 2}] == doctest::Approx(-1.0));
    CHECK(t[{0, 0}] == doctest::Approx(1.0));
}

TEST_CASE("parser: rational literals and exact evaluation") {
    Poly2 p = parseExpression("1/2*x + 3/4*y^2 - 2");
    CHECK(p.eval(2.0, 2.0) == doctest::Approx(1.0 + 3.0 - 2.0));
    // evaluation at rational points reproduces the expression exactly
    CHECK(p.eval(4.0, 0.0) == 0.0);
}

TEST_CASE("parser: errors carry positions") {
    CHECK_THROWS_AS(parseExpression("x +* y"), ParseError);
    CHECK_THROWS_AS(parseExpression("x / y"), ParseError);       // non-constant divisor
    CHECK_THROWS_AS(parseExpression("x ^ 2.5"), ParseError);     // fractional exponent
    CHECK_THROWS_AS(parseExpression("x ^ 30"), ParseError);      // degree overflow
    CHECK_THROWS_AS(parseExpression("z + 1"), ParseError);       // unknown identifier
    CHECK_THROWS_AS(parseExpression("x / 0"), ParseError);
    try {
        parseExpression("x + (y");
    } catch (const ParseError& e) {
        CHECK(e.position > 0);
    }
}

TEST_CASE("parser: parameter substitution") {
    Poly2 p = parseExpression("eps*x^3 + y", {{"eps", 0.25}});
    CHECK(p.at(3, 0) == doctest::Approx(0.25));
    CHECK(p.at(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("derivatives are exact") {
    Poly2 p = parseExpression("x^3*y^2 - 2*x*y + 7");
    Poly2 px = p.dx();
    CHECK(px.eval(2.0, 3.0) == doctest::Approx(3 * 4 * 9 - 2 * 3));
    Poly2 pxy = p.derivative(1, 1);
    CHECK(pxy.eval(2.0, 3.0) == doctest::Approx(6 * 4 * 3 - 2));
}

TEST_CASE("composeAffine matches pointwise evaluation") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Poly2 p = randomPoly(rng, 4);
        double ax = u(rng), bx = u(rng), cx = u(rng);
        double ay = u(rng), by = u(rng), cy = u(rng);
        Poly2 q = p.composeAffine(ax, bx, cx, ay, by, cy);
        for (int k = 0; k < 5; ++k) {
            double uu = u(rng), vv = u(rng);
            double direct = p.eval(ax * uu + bx * vv + cx, ay * uu + by * vv + cy);
            CHECK(q.eval(uu, vv) == doctest::Approx(direct).epsilon(1e-12));
        }
    }
}

TEST_CASE("restrictLine matches pointwise evaluation") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Poly2 p = randomPoly(rng, 5);
        Point2 base{u(rng), u(rng)}, dir{u(rng), u(rng)};
        auto coef = p.restrictLine(base, dir);
        for (int k = 0; k < 4; ++k) {
            double t = u(rng);
            double horner = 0.0;
            for (std::size_t i = coef.size(); i-- > 0;) horner = horner * t + coef[i];
            double direct = p.eval(base.x + t * dir.x, base.y + t * dir.y);
            CHECK(horner == doctest::Approx(direct).epsilon(1e-12));
        }
    }
}
