#include <doctest.h>

#include <cmath>
#include <random>

#include "godron/surface.hpp"

using namespace godron;

TEST_CASE("eval_jet: normal form at the origin") {
    PolySurface s = parse_surface("y^2/2 - x^2*y + x^4");  // lambda = 1
    Jet j = eval_jet(s, {0, 0}, 4);
    CHECK(j.p(0, 0) == 0.0);
    CHECK(j.p(1, 0) == 0.0);
    CHECK(j.p(0, 1) == 0.0);
    CHECK(j.p(2, 0) == 0.0);
    CHECK(j.p(1, 1) == 0.0);
    CHECK(j.p(3, 0) == 0.0);
    CHECK(j.p(0, 2) == doctest::Approx(1.0));
    CHECK(j.p(2, 1) == doctest::Approx(-2.0));
    CHECK(j.p(4, 0) == doctest::Approx(24.0));
}

TEST_CASE("eval_jet: paraboloid and product quartic") {
    PolySurface s1 = parse_surface("x^2 + y^2");
    Jet j1 = eval_jet(s1, {0, 0}, 2);
    CHECK(j1.p(2, 0) == doctest::Approx(2.0));
    CHECK(j1.p(0, 2) == doctest::Approx(2.0));
    CHECK(j1.p(1, 1) == 0.0);

    PolySurface s2 = parse_surface("(x^2-1)*(y^2-1)");
    Jet j2 = eval_jet(s2, {0, 0}, 2);
    CHECK(j2.p(2, 0) == doctest::Approx(-2.0));
    CHECK(j2.p(0, 2) == doctest::Approx(-2.0));
    CHECK(j2.p(1, 1) == 0.0);
}

TEST_CASE("eval_jet agrees with central finite differences") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int trial = 0; trial < 10; ++trial) {
        Poly2 p(4, 4);
        for (int i = 0; i <= 4; ++i)
            for (int j = 0; i + j <= 4; ++j) p.at(i, j) = u(rng);
        PolySurface s(p);
        Point2 pt{u(rng), u(rng)};
        Jet jet = eval_jet(s, pt, 3);
        double h = 1e-4;
        // d2f/dxdy by central differences
        double fd = (s.eval(pt.x + h, pt.y + h) - s.eval(pt.x + h, pt.y - h) -
                     s.eval(pt.x - h, pt.y + h) + s.eval(pt.x - h, pt.y - h)) /
                    (4 * h * h);
        CHECK(std::abs(jet.p(1, 1) - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
        double fdx = (s.eval(pt.x + h, pt.y) - s.eval(pt.x - h, pt.y)) / (2 * h);
        CHECK(std::abs(jet.p(1, 0) - fdx) < 1e-6 * std::max(1.0, std::abs(fdx)));
    }
}

TEST_CASE("adapted_chart: normal form is already adapted") {
    PolySurface s = parse_surface("y^2/2 - x^2*y + x^4");
    auto [chart, jet] = adapted_chart(s, {0, 0}, {SlopeChart::P, 0.0});
    CHECK(chart.origin3.z == 0.0);
    CHECK(std::abs(chart.det()) == doctest::Approx(1.0));
    // conditions (2) and (3)
    CHECK(jet.p(0, 0) == 0.0);
    CHECK(jet.p(1, 0) == 0.0);
    CHECK(jet.p(0, 1) == 0.0);
    CHECK(std::abs(jet.p(2, 0)) < 1e-12);
    CHECK(std::abs(jet.p(1, 1)) < 1e-12);
    CHECK(std::abs(jet.p(3, 0)) < 1e-12);
    // the chart may flip u and/or w; the invariant combination is fixed:
    // f_vv > 0, and f_vv * f_uuuu / f_uuv^2 = 24 lambda / 4 = 6 lambda
    CHECK(jet.p(0, 2) == doctest::Approx(1.0));
    double inv = jet.p(0, 2) * jet.p(4, 0) / (jet.p(2, 1) * jet.p(2, 1));
    CHECK(inv == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("adapted_chart: undoes a rotation of the surface") {
    // rotate the lambda=1 normal form by 30 degrees and re-adapt
    double th = M_PI / 6, c = std::cos(th), sn = std::sin(th);
    PolySurface base = parse_surface("y^2/2 - x^2*y + x^4");
    // f_rot(x, y) = f(c x + s y, -s x + c y)
    PolySurface rot(base.poly().composeAffine(c, sn, 0, -sn, c, 0));
    // asymptotic direction (1,0) rotates to (c, s) under the inverse map
    Point2 dir{c, sn};
    auto [chart, jet] = adapted_chart(rot, {0, 0}, SlopeDir::fromDirection(dir));
    Jet ref = eval_jet(base, {0, 0}, 6);
    // ratios of canonical jet entries are restored
    double inv = jet.p(0, 2) * jet.p(4, 0) / (jet.p(2, 1) * jet.p(2, 1));
    double invRef = ref.p(0, 2) * ref.p(4, 0) / (ref.p(2, 1) * ref.p(2, 1));
    CHECK(inv == doctest::Approx(invRef).epsilon(1e-9));
    CHECK(std::abs(jet.p(2, 0)) < 1e-9);
    CHECK(std::abs(jet.p(1, 1)) < 1e-9);
    CHECK(std::abs(jet.p(3, 0)) < 1e-9);
}

TEST_CASE("adapted_chart rejects non-parabolic points") {
    PolySurface s = parse_surface("x^2 + y^2");
    CHECK_THROWS_AS(adapted_chart(s, {0, 0}, {SlopeChart::P, 0.0}), AnalysisError);
}

TEST_CASE("chart roundtrip is the identity") {
    PolySurface s = parse_surface("y^2/2 - x^2*y + 0.75*x^4");
    auto [chart, jet] = adapted_chart(s, {0, 0}, {SlopeChart::P, 0.0});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int k = 0; k < 10; ++k) {
        Point2 p{u(rng), u(rng)};
        Point2 q = chart.toChart(chart.toAmbient(p));
        CHECK(norm(q - p) < 1e-10);
    }
}
