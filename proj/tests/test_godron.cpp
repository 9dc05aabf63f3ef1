#include <doctest.h>

#include <cmath>
#include <random>

#include "godron/godron.hpp"

using namespace godron;

namespace {

PolySurface normalFormLambda(double lambda) {
    return parse_surface("y^2/2 - x^2*y + c*x^4", {{"c", lambda}});
}
PolySurface normalFormRho(double rho) {
    return parse_surface("y^2/2 - x^2*y + r/2*x^4", {{"r", rho}});
}

}  // namespace

TEST_CASE("find_godrons: normal form has exactly one godron at the origin") {
    auto g = find_godrons(normalFormLambda(1.0), {-0.4, 0.4, -0.4, 0.4}, 256);
    REQUIRE(g.size() == 1);
    CHECK(norm(g[0].location) < 1e-9);
    CHECK(std::abs(g[0].slope.slope) < 1e-9);
}

TEST_CASE("find_godrons: the product quartic has 4, the factorisable cubic 3") {
    auto g4 = find_godrons(parse_surface("(x^2-1)*(y^2-1)"), {-2, 2, -2, 2}, 512);
    CHECK(g4.size() == 4);
    auto g3 = find_godrons(parse_surface("x*y*(1 - x - y)"), {-1, 2, -1, 2}, 512);
    CHECK(g3.size() == 3);
}

TEST_CASE("godron_index: sign of rho - 1; winding agrees with the linearization") {
    // the linearization determinant for the normal form is 24 (2 lambda - 1)
    for (double lambda : {-0.5, -0.25, 0.1, 0.25, 0.375, 0.45, 1.0}) {
        PolySurface s = normalFormLambda(lambda);
        IndexResult r = godron_index(s, {{0, 0}, {SlopeChart::P, 0}});
        int expect = 2 * lambda > 1 ? 1 : -1;
        CHECK(r.index == expect);
        CHECK(r.winding == expect);
        CHECK(r.detSign == expect);
        CHECK(r.consistent);
    }
    // all four godrons of the product quartic are negative
    PolySurface q = parse_surface("(x^2-1)*(y^2-1)");
    for (const auto& g : find_godrons(q, {-2, 2, -2, 2}, 512)) {
        IndexResult r = godron_index(q, g);
        CHECK(r.index == -1);
        CHECK(r.consistent);
    }
    // and of the factorisable cubic
    PolySurface c = parse_surface("x*y*(1 - x - y)");
    for (const auto& g : find_godrons(c, {-1, 2, -1, 2}, 512)) {
        IndexResult r = godron_index(c, g);
        CHECK(r.index == -1);
        CHECK(r.consistent);
    }
}

TEST_CASE("canonical_fit: exact parabolas and the u-axis") {
    PlanarCurve par, axis;
    for (int k = -30; k <= 30; ++k) {
        double u = 0.003 * k;
        par.samples.push_back({u, 4.0 * u * u});
        axis.samples.push_back({u, 0.0});
    }
    CHECK(canonical_fit(par, 0.08).value == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(std::abs(canonical_fit(axis, 0.08).value) < 1e-12);
}

TEST_CASE("canonical_fit on traced local curves of the lambda=1 normal form") {
    PolySurface s = normalFormLambda(1.0);
    Window w{-0.4, 0.4, -0.4, 0.4};
    GodronContext ctx = prepare_godron(s, {{0, 0}, {SlopeChart::P, 0}}, 0.05 * w.diagonal());
    auto toChart = [&](const PlanarCurve& amb) {
        PlanarCurve c;
        for (auto& p : amb.samples) c.samples.push_back(ctx.chart.toChart(p));
        return c;
    };
    // (P): y = 4x^2, (F): y = 6x^2, (D): y = 2x^2 for rho = 2 (ratios to cS)
    double cS = separating_jet(s, ctx);
    CHECK(canonical_fit(toChart(local_parabolic(s, ctx)), ctx.fitHalfWidth).value / cS ==
          doctest::Approx(4.0).epsilon(1e-3));
    CHECK(canonical_fit(toChart(local_flecnodal(s, ctx)), ctx.fitHalfWidth).value / cS ==
          doctest::Approx(6.0).epsilon(1e-3));
    PlanarCurve dn = trace_conodal_local(s, ctx);
    REQUIRE(!dn.empty());
    CHECK(canonical_fit(toChart(dn), ctx.fitHalfWidth).value / cS ==
          doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("separating_jet: |cS| = 1 on normal forms; chart covariance") {
    for (double lambda : {-0.5, 0.25, 1.0}) {
        PolySurface s = normalFormLambda(lambda);
        GodronContext ctx = prepare_godron(s, {{0, 0}, {SlopeChart::P, 0}}, 0.05);
        double cS = separating_jet(s, ctx);
        CHECK(std::abs(std::abs(cS) - 1.0) < 1e-6);  // the chart may flip axes
        // rescaling the v-axis doubles every canonical coefficient
        GodronContext ctx2 = ctx;
        ctx2.chart.linearMap[2] *= 0.5;
        ctx2.chart.linearMap[3] *= 0.5;
        double cS2 = separating_jet(s, ctx2);
        CHECK(cS2 == doctest::Approx(2 * cS).epsilon(1e-9));
    }
}

TEST_CASE("separating_jet: dual cusp directions flip across cS (Lemma check)") {
    // second dual coordinate of the image of (t, c t^2) is (c - 1) t^2 for
    // the normal form: opposite cusp sides for c = 2 and c = 0
    PolySurface s = normalFormRho(2.0);
    auto dualY = [&](double c, double t) {
        double x = t, y = c * t * t;
        return s.deriv(0, 1, {x, y});  // f_y component of the dual point
    };
    CHECK(dualY(2.0, 0.1) == doctest::Approx(+0.01).epsilon(1e-12));
    CHECK(dualY(0.0, 0.1) == doctest::Approx(-0.01).epsilon(1e-12));
}

TEST_CASE("trace_conodal_local: cubic correction of the flec-godron family") {
    // conodal curve y = rho x^2 + 2 a x^3 + ... with a = 1, rho = 0.4
    PolySurface s = parse_surface("y^2/2 - x^2*y + 0.2*x^4 + x^5");
    GodronContext ctx = prepare_godron(s, {{0, 0}, {SlopeChart::P, 0}}, 0.04);
    PlanarCurve dn = trace_conodal_local(s, ctx);
    REQUIRE(!dn.empty());
    PlanarCurve chartCurve;
    for (auto& p : dn.samples) chartCurve.samples.push_back(ctx.chart.toChart(p));
    FitResult fit = canonical_fit(chartCurve, ctx.fitHalfWidth);
    double cS = separating_jet(s, ctx);
    double uSign = ctx.chart.linearMap[0] >= 0 ? 1.0 : -1.0;  // u axis may flip
    CHECK(fit.value / cS == doctest::Approx(0.4).epsilon(5e-3));
    CHECK(uSign * fit.cubic / cS == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("cr_invariant: rho = 2 lambda with agreeing routes") {
    for (double lambda : {-0.5, -0.25, 0.1, 0.25, 0.375, 0.45, 1.0}) {
        PolySurface s = normalFormLambda(lambda);
        GodronContext ctx = prepare_godron(s, {{0, 0}, {SlopeChart::P, 0}}, 0.055);
        RhoResult r = cr_invariant(s, ctx);
        CHECK(std::abs(r.rho - 2 * lambda) < 1e-6);
        CHECK(std::abs(r.diagnostics.rhoParabolic - 2 * lambda) < 1e-6);
        CHECK(std::abs(r.diagnostics.rhoFlecnodal - 2 * lambda) < 1e-6);
        REQUIRE(r.diagnostics.rhoCrossRatio.has_value());
        CHECK(std::abs(*r.diagnostics.rhoCrossRatio - 2 * lambda) < 1e-6);
        CHECK(!r.diagnostics.inconsistent);
        // canonical coefficient ratios against cS
        double cS = *r.coeffs.cS;
        double rho = 2 * lambda;
        CHECK(*r.coeffs.cP / cS == doctest::Approx(3 * rho - 2).epsilon(1e-6));
        CHECK(*r.coeffs.cF / cS == doctest::Approx(rho * (2 * rho - 1)).epsilon(1e-6));
        CHECK(*r.coeffs.cD / cS == doctest::Approx(rho).epsilon(1e-6));
        // tangency identity: cF - cP = 2 (rho - 1)^2 cS
        CHECK((*r.coeffs.cF - *r.coeffs.cP) / cS ==
              doctest::Approx(2 * (rho - 1) * (rho - 1)).epsilon(1e-6));
    }
}

TEST_CASE("cr_invariant: ordering row for rho = -1") {
    PolySurface s = normalFormLambda(-0.5);
    GodronContext ctx = prepare_godron(s, {{0, 0}, {SlopeChart::P, 0}}, 0.055);
    RhoResult r = cr_invariant(s, ctx);
    double cS = *r.coeffs.cS;
    double cP = *r.coeffs.cP / cS, cD = *r.coeffs.cD / cS, cF = *r.coeffs.cF / cS;
    CHECK(cP == doctest::Approx(-5.0).epsilon(1e-5));
    CHECK(cD == doctest::Approx(-1.0).epsilon(1e-5));
    CHECK(cF == doctest::Approx(3.0).epsilon(1e-5));
    CHECK((cP < cD && cD < 0 && 1 < cF));
}

TEST_CASE("cr_invariant is invariant under linear changes of the source plane") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    PolySurface base = normalFormLambda(0.375);  // rho = 0.75
    int tested = 0;
    for (int trial = 0; trial < 6 && tested < 3; ++trial) {
        double m00 = 1 + u(rng) * 0.5, m01 = u(rng) * 0.5;
        double m10 = u(rng) * 0.5, m11 = 1 + u(rng) * 0.5;
        if (std::abs(m00 * m11 - m01 * m10) < 0.2) continue;
        PolySurface s(base.poly().composeAffine(m00, m01, 0, m10, m11, 0));
        auto g = find_godrons(s, {-0.3, 0.3, -0.3, 0.3}, 256);
        const GodronSeed* at0 = nullptr;
        for (auto& gg : g)
            if (norm(gg.location) < 1e-7) at0 = &gg;
        REQUIRE(at0 != nullptr);
        GodronContext ctx = prepare_godron(s, *at0, 0.04);
        RhoResult r = cr_invariant(s, ctx);
        CHECK(std::abs(r.rho - 0.75) < 1e-5);
        CHECK(std::abs(*r.coeffs.cP / *r.coeffs.cS - (3 * 0.75 - 2)) < 1e-5);
        CHECK(std::abs(*r.coeffs.cF / *r.coeffs.cS - 0.75 * 0.5) < 1e-5);
        ++tested;
    }
    CHECK(tested >= 3);
}

TEST_CASE("classify_godron: rows from the interval tables") {
    ClassLabels a = classify_godron(2.0);
    CHECK(a.sixConfig == "(1,inf)");
    CHECK(a.swallowtail4 == "e");
    CHECK(a.swallowtail7 == "e1");
    CHECK(a.sContour6 == "trivial");
    CHECK(a.contourConfig == "(4/3,inf)");
    CHECK(a.sectionConfig == "(1,inf)");
    CHECK(a.convexity == "hyperbolic-convex");

    ClassLabels b = classify_godron(0.75);
    CHECK(b.sixConfig == "(2/3,1)");
    // numeric ordering of the row: 0 < cP < cF < cD < 1
    double cP = 3 * 0.75 - 2, cF = 0.75 * (2 * 0.75 - 1), cD = 0.75;
    CHECK((0 < cP && cP < cF && cF < cD && cD < 1));

    ClassLabels c = classify_godron(-0.25);
    CHECK(c.sixConfig == "(-1/2,0)");
    CHECK(c.swallowtail4 == "h2");
    cP = 3 * -0.25 - 2;
    cF = -0.25 * (2 * -0.25 - 1);
    cD = -0.25;
    CHECK((cP < cD && cD < 0 && 0 < cF && cF < 1));

    ClassLabels d = classify_godron(0.5 + 1e-8);
    CHECK(!d.boundaryFlags.empty());

    CHECK_THROWS_AS(classify_godron(1e-6), AnalysisError);
    CHECK_THROWS_AS(classify_godron(1 + 1e-6), AnalysisError);
}

TEST_CASE("tangent_section_local: trivial for positive godrons, coefficients otherwise") {
    {
        PolySurface s = normalFormRho(2.0);
        GodronContext ctx = prepare_godron(s, {{0, 0}, {SlopeChart::P, 0}}, 0.05);
        LocalBranches tb = tangent_section_local(s, ctx, 2.0);
        CHECK(tb.trivial);
    }
    {
        PolySurface s = normalFormRho(0.5);
        GodronContext ctx = prepare_godron(s, {{0, 0}, {SlopeChart::P, 0}}, 0.05);
        LocalBranches tb = tangent_section_local(s, ctx, 0.5);
        REQUIRE(!tb.trivial);
        REQUIRE(tb.cMinus.has_value());
        REQUIRE(tb.cPlus.has_value());
        double cS = separating_jet(s, ctx);
        CHECK(*tb.cMinus / cS == doctest::Approx(1 - std::sqrt(0.5)).epsilon(1e-3));
        CHECK(*tb.cPlus / cS == doctest::Approx(1 + std::sqrt(0.5)).epsilon(1e-3));
        // Vieta: sum 2 cS, product rho cS^2
        CHECK((*tb.cMinus + *tb.cPlus) / (2 * cS) == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(*tb.cMinus * *tb.cPlus / (0.5 * cS * cS) == doctest::Approx(1.0).epsilon(1e-3));
    }
    {
        // rho = 0.95: ordering cT- < cP < cF < cD < 1 < cT+
        PolySurface s = normalFormRho(0.95);
        GodronContext ctx = prepare_godron(s, {{0, 0}, {SlopeChart::P, 0}}, 0.05);
        LocalBranches tb = tangent_section_local(s, ctx, 0.95);
        REQUIRE(!tb.trivial);
        double cS = separating_jet(s, ctx);
        double tm = *tb.cMinus / cS, tp = *tb.cPlus / cS;
        CHECK(tm == doctest::Approx(1 - std::sqrt(0.05)).epsilon(2e-3));
        CHECK(tp == doctest::Approx(1 + std::sqrt(0.05)).epsilon(2e-3));
        double cP = 3 * 0.95 - 2, cF = 0.95 * 0.9, cD = 0.95;
        CHECK((tm < cP && cP < cF && cF < cD && cD < 1 && 1 < tp));
    }
}

TEST_CASE("g_contour_local: trivial above 4/3, coefficients otherwise") {
    {
        PolySurface s = normalFormRho(2.0);
        GodronContext ctx = prepare_godron(s, {{0, 0}, {SlopeChart::P, 0}}, 0.05);
        CHECK(g_contour_local(s, ctx, 2.0).trivial);
    }
    {
        PolySurface s = normalFormRho(0.5);
        GodronContext ctx = prepare_godron(s, {{0, 0}, {SlopeChart::P, 0}}, 0.05);
        LocalBranches cb = g_contour_local(s, ctx, 0.5);
        REQUIRE(!cb.trivial);
        REQUIRE(cb.cMinus.has_value());
        REQUIRE(cb.cPlus.has_value());
        double cS = separating_jet(s, ctx);
        CHECK(*cb.cMinus / cS == doctest::Approx(2 - std::sqrt(2.5)).epsilon(5e-3));
        CHECK(*cb.cPlus / cS == doctest::Approx(2 + std::sqrt(2.5)).epsilon(5e-3));
        CHECK((*cb.cMinus + *cb.cPlus) / (4 * cS) == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(*cb.cMinus * *cb.cPlus / (3 * 0.5 * cS * cS) ==
              doctest::Approx(1.0).epsilon(2e-3));
    }
    {
        // rho = 1.2 in (1, sqrt7/2): ordering 1 < cD < cC- < cP < cF < cC+
        PolySurface s = normalFormRho(1.2);
        GodronContext ctx = prepare_godron(s, {{0, 0}, {SlopeChart::P, 0}}, 0.05);
        LocalBranches cb = g_contour_local(s, ctx, 1.2);
        REQUIRE(!cb.trivial);
        double cS = separating_jet(s, ctx);
        double cm = *cb.cMinus / cS, cp = *cb.cPlus / cS;
        double cD = 1.2, cP = 3 * 1.2 - 2, cF = 1.2 * 1.4;
        CHECK((1 < cD && cD < cm && cm < cP && cP < cF && cF < cp));
    }
}

TEST_CASE("flattening residuals vanish for curves through normal-form godrons") {
    for (double lambda : {-0.5, 0.25, 1.0}) {
        PolySurface s = normalFormLambda(lambda);
        GodronContext ctx = prepare_godron(s, {{0, 0}, {SlopeChart::P, 0}}, 0.055);
        for (auto kind : {TangentCurveKind::Parabolic, TangentCurveKind::Flecnodal,
                          TangentCurveKind::Conodal}) {
            Point3 r = flattening_residuals(s, ctx, kind);
            CHECK(r.x < 1e-6);
            CHECK(r.y < 1e-6);
            CHECK(r.z < 1e-6);
        }
    }
}

TEST_CASE("slope-difference derivative has sign -sign(rho - 1)") {
    for (double rho : {-1.0, 0.2, 0.75, 2.0}) {
        PolySurface s = normalFormRho(rho);
        GodronContext ctx = prepare_godron(s, {{0, 0}, {SlopeChart::P, 0}}, 0.05);
        double d = slope_difference_derivative(s, ctx);
        CHECK(d * (rho - 1) < 0);
    }
}

TEST_CASE("build_godron_record: full record for the lambda = 1 normal form") {
    PolySurface s = normalFormLambda(1.0);
    GodronOptions opts;
    opts.sections = true;
    opts.contours = true;
    GodronRecord rec =
        build_godron_record(s, {{0, 0}, {SlopeChart::P, 0}}, {-0.4, 0.4, -0.4, 0.4}, opts);
    CHECK(std::abs(rec.rho - 2.0) < 1e-5);
    CHECK(rec.index.index == 1);
    REQUIRE(rec.labels.has_value());
    CHECK(rec.labels->sixConfig == "(1,inf)");
    CHECK(rec.labels->swallowtail7 == "e1");
    CHECK(!rec.nearFlecGodron);
    CHECK(!rec.nearBigodron);
    // rho = 2: both the tangent section and the g-contour are trivial
    bool sectionTrivial = false, contourTrivial = false;
    for (auto& f : rec.flags) {
        if (f == "SectionTrivial") sectionTrivial = true;
        if (f == "ContourTrivial") contourTrivial = true;
    }
    CHECK(sectionTrivial);
    CHECK(contourTrivial);
}
