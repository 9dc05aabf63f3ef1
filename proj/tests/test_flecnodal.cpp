#include <doctest.h>

#include <cmath>

#include "godron/flecnodal.hpp"

using namespace godron;

namespace {

PolySurface normalForm(double lambda) {
    return parse_surface("y^2/2 - x^2*y + c*x^4", {{"c", lambda}});
}

double fitQuadCoeff(const PlanarCurve& c, double halfWidth) {
    double num = 0, den = 0;
    for (const Point2& p : c.samples) {
        if (std::abs(p.x) > halfWidth) continue;
        num += p.y * p.x * p.x;
        den += p.x * p.x * p.x * p.x;
    }
    return den > 0 ? num / den : 0.0;
}

// independent all-pairs segment intersection counter: Cramer solve per
// pair, exact-cluster dedup. Only label-stable segments participate, the
// same admissibility rule the implementation uses (segments spanning a
// label flip sit at godron tangencies where a crossing is not resolvable
// at the trace resolution).
int bruteForceCrossings(const std::vector<FlecnodalTrace>& traces, double dedup) {
    struct S {
        Point2 a, b;
        std::size_t t, k;
    };
    std::vector<S> segs;
    for (std::size_t t = 0; t < traces.size(); ++t)
        for (std::size_t k = 0; k + 1 < traces[t].projected.samples.size(); ++k) {
            const auto& labels = traces[t].labels;
            if (labels.size() > k + 1) {
                BranchLabel la = labels[k], lb = labels[k + 1];
                if (la == BranchLabel::Flattening) la = lb;
                bool stable =
                    la != BranchLabel::Flattening && (la == lb || lb == BranchLabel::Flattening);
                if (!stable) continue;
            }
            segs.push_back({traces[t].projected.samples[k],
                            traces[t].projected.samples[k + 1], t, k});
        }
    std::vector<Point2> found;
    for (std::size_t i = 0; i < segs.size(); ++i)
        for (std::size_t j = i + 1; j < segs.size(); ++j) {
            if (segs[i].t == segs[j].t) {
                std::size_t gap = segs[j].k - segs[i].k;
                std::size_t n = traces[segs[i].t].projected.samples.size();
                if (gap <= 2 || (traces[segs[i].t].closed && gap + 3 >= n)) continue;
            }
            // solve a + t1 (b - a) = c + t2 (d - c)
            double a11 = segs[i].b.x - segs[i].a.x, a12 = -(segs[j].b.x - segs[j].a.x);
            double a21 = segs[i].b.y - segs[i].a.y, a22 = -(segs[j].b.y - segs[j].a.y);
            double det = a11 * a22 - a12 * a21;
            if (std::abs(det) < 1e-300) continue;
            double r1 = segs[j].a.x - segs[i].a.x, r2 = segs[j].a.y - segs[i].a.y;
            double t1 = (r1 * a22 - a12 * r2) / det;
            double t2 = (a11 * r2 - r1 * a21) / det;
            if (t1 <= 0 || t1 >= 1 || t2 <= 0 || t2 >= 1) continue;
            double ang = std::atan2(std::abs(det), a11 * -a12 + a21 * -a22);
            if (ang > M_PI / 2) ang = M_PI - ang;
            if (ang < 0.02) continue;
            Point2 p{segs[i].a.x + t1 * a11, segs[i].a.y + t1 * a21};
            bool dup = false;
            for (auto& q : found)
                if (norm(q - p) < dedup) dup = true;
            if (!dup) found.push_back(p);
        }
    return static_cast<int>(found.size());
}

}  // namespace

TEST_CASE("inflection_eval: closed form for the normal form") {
    double lambda = 0.7;
    PolySurface s = normalForm(lambda);
    for (double x : {-0.2, 0.0, 0.3})
        for (double y : {-0.1, 0.2})
            for (double p : {-0.5, 0.0, 1.0}) {
                Jet j = eval_jet(s, {x, y}, 3);
                CHECK(inflection_eval(j, p, SlopeChart::P) ==
                      doctest::Approx(6 * (4 * lambda * x - p)).epsilon(1e-12));
            }
    // vanishes along p = 4 lambda x
    Jet j = eval_jet(s, {0.11, 0.04}, 3);
    CHECK(inflection_eval(j, 4 * lambda * 0.11, SlopeChart::P) ==
          doctest::Approx(0.0).epsilon(1e-14));
    // all third partials of a paraboloid vanish
    Jet jp = eval_jet(parse_surface("x^2 + y^2"), {0.5, -0.3}, 3);
    CHECK(inflection_eval(jp, 0.37, SlopeChart::P) == 0.0);
}

TEST_CASE("trace_flecnodal: normal form fits y = 6x^2") {
    PolySurface s = normalForm(1.0);  // rho = 2, c_F = rho(2rho-1) = 6
    auto traces = trace_flecnodal(s, {-0.4, 0.4, -0.4, 0.4}, 256);
    REQUIRE(!traces.empty());
    const FlecnodalTrace* through0 = nullptr;
    for (auto& t : traces)
        for (auto& p : t.projected.samples)
            if (norm(p) < 5e-3) through0 = &t;
    REQUIRE(through0 != nullptr);
    double c = fitQuadCoeff(through0->projected, 0.1);
    CHECK(std::abs(c - 6.0) < 1e-3);
    // projection stays in the closed hyperbolic domain
    for (auto& p : through0->projected.samples) CHECK(hessian_det(s, p) < 1e-7);
    // on-curve quality and 4-point contact along the trace
    for (std::size_t k = 0; k < through0->lifted.size(); k += 5) {
        const auto& lp = through0->lifted[k];
        Jet jk = eval_jet(s, lp.xy(), 3);
        CHECK(std::abs(asymptote_eval(jk, lp.slope, lp.chart)) < 1e-9);
        CHECK(std::abs(inflection_eval(jk, lp.slope, lp.chart)) < 1e-8);
        CHECK(contact_order(s, lp.xy(), lp.dir().direction(), 6) >= 4);
    }
}

TEST_CASE("trace_flecnodal: empty for an elliptic surface") {
    CHECK(trace_flecnodal(parse_surface("x^2 + y^2"), {-1, 1, -1, 1}, 128).empty());
}

TEST_CASE("trace_flecnodal: factorisable cubic lies on the three lines") {
    PolySurface s = parse_surface("x*y*(1 - x - y)");
    auto traces = trace_flecnodal(s, {-0.8, 1.6, -0.8, 1.6}, 256);
    REQUIRE(!traces.empty());
    double worst = 0;
    std::size_t total = 0;
    for (auto& t : traces)
        for (auto& p : t.projected.samples) {
            double dLines = std::min(
                {std::abs(p.x), std::abs(p.y), std::abs(p.x + p.y - 1) / std::sqrt(2.0)});
            worst = std::max(worst, dLines);
            ++total;
        }
    CHECK(total > 100);
    CHECK(worst < 1e-6);
}

TEST_CASE("contact_order examples") {
    CHECK(contact_order(normalForm(1.0), {0, 0}, {1, 0}, 6) == 4);
    CHECK(contact_order(normalForm(-0.5), {0, 0}, {1, 0}, 6) == 4);
    PolySurface fg = parse_surface("y^2/2 - x^2*y + x^5");
    CHECK(contact_order(fg, {0, 0}, {1, 0}, 6) == 5);
    CHECK(contact_order(parse_surface("x^2 + y^2"), {0, 0}, {1, 0}, 6) == 2);
    // ruled direction: contact beyond maxOrder reported as maxOrder + 1
    CHECK(contact_order(parse_surface("x*y"), {1, 1}, {1, 0}, 6) == 7);
}

TEST_CASE("left_right_label: helix oracles") {
    SpaceCurve right, mirror;
    for (int k = 0; k <= 60; ++k) {
        double t = 0.05 * k;
        right.samples.push_back({std::cos(t), std::sin(t), t});
        mirror.samples.push_back({std::cos(t), std::sin(t), -t});
    }
    CHECK(left_right_label(right, 30) == BranchLabel::Right);
    CHECK(left_right_label(mirror, 30) == BranchLabel::Left);
}

TEST_CASE("left-right pairing: the two asymptotic curves get opposite labels") {
    PolySurface s = normalForm(1.0);
    Window w{-0.6, 0.6, -0.05, 0.6};
    auto rPlus = integrate_asymptotic(s, {0.0, 0.08, 0.4, SlopeChart::P}, 0.3, w, 2e-3);
    auto rMinus = integrate_asymptotic(s, {0.0, 0.08, -0.4, SlopeChart::P}, 0.3, w, 2e-3);
    REQUIRE(rPlus.curve.samples.size() > 20);
    REQUIRE(rMinus.curve.samples.size() > 20);
    BranchLabel lp = left_right_label(rPlus.curve, 10);
    BranchLabel lm = left_right_label(rMinus.curve, 10);
    CHECK(lp != lm);
    CHECK(lp != BranchLabel::Flattening);
    CHECK(lm != BranchLabel::Flattening);
    // the closed-form frame sign agrees with the integrated one
    CHECK(asymptoticFrameSign(s, rPlus.lifted[10]) == lp);
    CHECK(asymptoticFrameSign(s, rMinus.lifted[10]) == lm);
}

TEST_CASE("label_branches: one flip at the godron; right branch location") {
    PolySurface s = normalForm(1.0);  // rho = 2 > 1: positive godron
    auto traces = trace_flecnodal(s, {-0.3, 0.3, -0.3, 0.3}, 256);
    const FlecnodalTrace* through0 = nullptr;
    for (auto& t : traces)
        for (auto& p : t.projected.samples)
            if (norm(p) < 5e-3) through0 = &t;
    REQUIRE(through0 != nullptr);
    FlecnodalTrace lt = label_branches(*through0, s);
    std::vector<BranchLabel> seq;
    for (std::size_t k = 0; k < lt.labels.size(); ++k) {
        if (lt.labels[k] == BranchLabel::Flattening) continue;
        if (seq.empty() || seq.back() != lt.labels[k]) seq.push_back(lt.labels[k]);
    }
    REQUIRE(seq.size() == 2);  // exactly one flip
    // positive godron: Right branch on the positive x side (the normal form
    // chart satisfies the orientation conventions)
    for (std::size_t k = 0; k < lt.lifted.size(); ++k) {
        if (lt.labels[k] == BranchLabel::Flattening) continue;
        if (lt.lifted[k].x > 0.05) CHECK(lt.labels[k] == BranchLabel::Right);
        if (lt.lifted[k].x < -0.05) CHECK(lt.labels[k] == BranchLabel::Left);
    }
}

TEST_CASE("find_hyperbonodes: none at a single godron; odd count in a hyperbolic disc") {
    // near the godron of a normal form the two flecnodal branches are
    // tangent, not crossing
    PolySurface nf = normalForm(1.0);
    auto nfTraces = trace_flecnodal(nf, {-0.3, 0.3, -0.3, 0.3}, 256);
    for (auto& t : nfTraces) t = label_branches(t, nf);
    CHECK(find_hyperbonodes(nfTraces).hyperbonodes.empty());

    // hyperbolic disc candidate
    PolySurface s = parse_surface("x^3 - 3*x*y^2 + (x^2+y^2)^2 + 0.1*x*y");
    Window w{-1.8, 1.8, -1.8, 1.8};
    auto traces = trace_flecnodal(s, w, 384);
    REQUIRE(!traces.empty());
    for (auto& t : traces) t = label_branches(t, s);
    auto found = find_hyperbonodes(traces);
    CHECK(found.hyperbonodes.size() % 2 == 1);
    CHECK(found.anomalies.empty());
    for (auto& h : found.hyperbonodes) {
        CHECK(h.labelA != h.labelB);
        CHECK(h.angle > 0.02);
    }
    // independent exhaustive intersection count agrees
    double step = w.diagonal() / 512;
    int brute = bruteForceCrossings(traces, 3 * step);
    CHECK(brute == static_cast<int>(found.hyperbonodes.size() + found.anomalies.size()));

    // label parity on closed components: even number of flips around the loop
    for (auto& t : traces) {
        if (!t.closed) continue;
        std::vector<BranchLabel> seq;
        for (auto l : t.labels) {
            if (l == BranchLabel::Flattening) continue;
            if (seq.empty() || seq.back() != l) seq.push_back(l);
        }
        if (seq.size() <= 1) continue;
        // runs around a loop: the wrap joins the last run to the first
        int flips = static_cast<int>(seq.size()) - (seq.front() == seq.back() ? 1 : 0);
        CHECK(flips % 2 == 0);
    }
}

TEST_CASE("find_biflecnodes: flec-godron family moves the biflecnode across the godron") {
    Window w{-0.35, 0.35, -0.2, 0.35};
    auto biflecOn = [&](double rho) {
        PolySurface s = parse_surface("y^2/2 - x^2*y + r/2*x^4 + x^5", {{"r", rho}});
        auto traces = trace_flecnodal(s, w, 256);
        std::vector<Biflecnode> all;
        for (auto& t : traces) {
            t = label_branches(t, s);
            auto b = find_biflecnodes(t, s);
            all.insert(all.end(), b.begin(), b.end());
        }
        return all;
    };
    auto plus = biflecOn(0.2);
    auto minus = biflecOn(-0.2);
    REQUIRE(plus.size() == 1);
    REQUIRE(minus.size() == 1);
    CHECK(norm(plus[0].location) < 0.2);
    CHECK(norm(minus[0].location) < 0.2);
    // the branch side flips with the sign of rho
    CHECK(plus[0].side != minus[0].side);
    // 5-point contact at the biflecnode
    PolySurface sp = parse_surface("y^2/2 - x^2*y + 0.1*x^4 + x^5");
    CHECK(contact_order(sp, plus[0].location, plus[0].slope.direction(), 7) >= 5);
}

TEST_CASE("find_biflecnodes: pure quartic normal form has none near the origin") {
    PolySurface s = normalForm(0.35);  // lambda not in {0, 1/2}
    auto traces = trace_flecnodal(s, {-0.25, 0.25, -0.2, 0.25}, 256);
    REQUIRE(!traces.empty());
    int count = 0;
    for (auto& t : traces) {
        t = label_branches(t, s);
        count += static_cast<int>(find_biflecnodes(t, s).size());
    }
    CHECK(count == 0);
}

TEST_CASE("find_biflecnodes: ruled components are tagged and skipped") {
    PolySurface s = parse_surface("x*y*(1 - x - y)");
    auto traces = trace_flecnodal(s, {-0.8, 1.6, -0.8, 1.6}, 256);
    REQUIRE(!traces.empty());
    for (auto& t : traces) {
        t = label_branches(t, s);
        auto b = find_biflecnodes(t, s);
        CHECK(t.ruled);
        CHECK(b.empty());
    }
}
