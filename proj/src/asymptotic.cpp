#include "godron/asymptotic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

#include "godron/kernels.hpp"

namespace godron {

double asymptote_eval(const Jet& j, double slope, SlopeChart chart) {
    double fxx = j.p(2, 0), fxy = j.p(1, 1), fyy = j.p(0, 2);
    if (chart == SlopeChart::P) return fxx + 2 * fxy * slope + fyy * slope * slope;
    return fyy + 2 * fxy * slope + fxx * slope * slope;
}

double hessian_det(const PolySurface& s, Point2 pt) {
    double fxx = s.deriv(2, 0, pt), fxy = s.deriv(1, 1, pt), fyy = s.deriv(0, 2, pt);
    return fxx * fyy - fxy * fxy;
}

Poly2 hessianPoly(const PolySurface& s) {
    return s.deriv(2, 0) * s.deriv(0, 2) - s.deriv(1, 1) * s.deriv(1, 1);
}

double gaussian_curvature(const PolySurface& s, Point2 pt) {
    double fx = s.deriv(1, 0, pt), fy = s.deriv(0, 1, pt);
    double g = 1.0 + fx * fx + fy * fy;
    return hessian_det(s, pt) / (g * g);
}

// ---------------------------------------------------------------------------
// Marching squares with edge-identity chaining.

namespace {

struct EdgeKey {
    int i, j;
    bool vertical;
    bool operator<(const EdgeKey& o) const {
        if (i != o.i) return i < o.i;
        if (j != o.j) return j < o.j;
        return vertical < o.vertical;
    }
};

struct ContourBuilder {
    const Poly2& field;
    Window win;
    int res;
    const std::vector<double>& grid;
    double dx, dy;

    std::map<EdgeKey, int> edgeIndex;          // edge -> crossing point id
    std::vector<Point2> points;                 // crossing positions
    std::vector<std::pair<int, int>> segments;  // pairs of crossing ids

    double value(int i, int j) const { return grid[std::size_t(j) * res + i]; }
    bool sign(int i, int j) const { return value(i, j) >= 0.0; }
    Point2 node(int i, int j) const { return {win.x0 + i * dx, win.y0 + j * dy}; }

    int crossing(EdgeKey e) {
        auto it = edgeIndex.find(e);
        if (it != edgeIndex.end()) return it->second;
        Point2 a = node(e.i, e.j);
        Point2 b = e.vertical ? node(e.i, e.j + 1) : node(e.i + 1, e.j);
        double va = value(e.i, e.j);
        double vb = e.vertical ? value(e.i, e.j + 1) : value(e.i + 1, e.j);
        double t = (va == vb) ? 0.5 : va / (va - vb);
        t = std::clamp(t, 0.0, 1.0);
        Point2 p = a + t * (b - a);
        int id = static_cast<int>(points.size());
        points.push_back(p);
        edgeIndex.emplace(e, id);
        return id;
    }

    // Decide the pairing in an ambiguous (saddle) cell from the sign at the
    // cell center, refining the probe up to `depth` levels when the center
    // value vanishes exactly.
    bool saddleCenterSign(Point2 c, double half, int depth) {
        double v = field.eval(c);
        if (v != 0.0) return v > 0.0;
        if (depth <= 0)
            throw AnalysisError("ResolutionTooCoarse",
                                "ambiguous saddle cell could not be resolved");
        int pos = 0, neg = 0;
        for (int k = 0; k < 4; ++k) {
            Point2 sub{c.x + (k & 1 ? half / 2 : -half / 2),
                       c.y + (k & 2 ? half / 2 : -half / 2)};
            if (saddleCenterSign(sub, half / 2, depth - 1))
                ++pos;
            else
                ++neg;
        }
        if (pos == neg)
            throw AnalysisError("ResolutionTooCoarse",
                                "ambiguous saddle cell could not be resolved");
        return pos > neg;
    }

    void cell(int i, int j) {
        int code = (sign(i, j) ? 1 : 0) | (sign(i + 1, j) ? 2 : 0) |
                   (sign(i + 1, j + 1) ? 4 : 0) | (sign(i, j + 1) ? 8 : 0);
        if (code == 0 || code == 15) return;
        EdgeKey B{i, j, false}, T{i, j + 1, false}, L{i, j, true}, R{i + 1, j, true};
        auto add = [&](EdgeKey a, EdgeKey b) {
            int ia = crossing(a), ib = crossing(b);
            if (ia != ib) segments.emplace_back(ia, ib);
        };
        switch (code) {
            case 1: add(L, B); break;
            case 2: add(B, R); break;
            case 3: add(L, R); break;
            case 4: add(R, T); break;
            case 6: add(B, T); break;
            case 7: add(L, T); break;
            case 8: add(T, L); break;
            case 9: add(B, T); break;
            case 11: add(R, T); break;
            case 12: add(L, R); break;
            case 13: add(B, R); break;
            case 14: add(B, L); break;
            case 5:
            case 10: {
                // Saddle cell: the center sign picks which corner pockets the
                // contour separates. {(B,R),(T,L)} when the center joins the
                // main-diagonal corners, {(B,L),(T,R)} otherwise.
                Point2 c = node(i, j) + 0.5 * (node(i + 1, j + 1) - node(i, j));
                bool cs = saddleCenterSign(c, std::min(dx, dy) / 2, 4);
                if (cs == (code == 5)) {
                    add(B, R);
                    add(T, L);
                } else {
                    add(B, L);
                    add(T, R);
                }
                break;
            }
            default: break;
        }
    }
};

}  // namespace

std::vector<PlanarCurve> trace_zero_set(const Poly2& field, Window window, int resolution,
                                        double polishTolRel) {
    if (window.degenerate()) throw AnalysisError("BadWindow", "window is empty");
    resolution = std::max(resolution, 16);

    std::vector<double> grid;
    kernels::fillGrid(field, window.x0, window.x1, window.y0, window.y1, resolution,
                      resolution, grid);
    double scale = 0.0;
    for (double v : grid) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return {};

    ContourBuilder cb{field, window, resolution, grid,
                      window.width() / (resolution - 1),
                      window.height() / (resolution - 1),
                      {}, {}, {}};
    for (int j = 0; j < resolution - 1; ++j)
        for (int i = 0; i < resolution - 1; ++i) cb.cell(i, j);

    // adjacency over crossing ids
    std::vector<std::vector<int>> adj(cb.points.size());
    for (auto [a, b] : cb.segments) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> usedPoint(cb.points.size(), false);
    std::set<std::pair<int, int>> usedSeg;
    auto segKey = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };

    auto walk = [&](int start) {
        std::vector<int> chain{start};
        int cur = start;
        for (;;) {
            int next = -1;
            for (int nb : adj[cur]) {
                if (!usedSeg.count(segKey(cur, nb))) {
                    next = nb;
                    break;
                }
            }
            if (next < 0) break;
            usedSeg.insert(segKey(cur, next));
            chain.push_back(next);
            cur = next;
            if (cur == start) break;
        }
        return chain;
    };

    std::vector<std::vector<int>> chains;
    for (std::size_t p = 0; p < cb.points.size(); ++p)
        if (adj[p].size() == 1 && !usedPoint[p]) {
            auto ch = walk(static_cast<int>(p));
            for (int id : ch) usedPoint[id] = true;
            if (ch.size() >= 2) chains.push_back(std::move(ch));
        }
    for (std::size_t p = 0; p < cb.points.size(); ++p)
        if (!adj[p].empty() && !usedPoint[p]) {
            auto ch = walk(static_cast<int>(p));
            for (int id : ch) usedPoint[id] = true;
            if (ch.size() >= 3) chains.push_back(std::move(ch));
        }

    // Newton polish transverse to the contour.
    Poly2 fx = field.dx(), fy = field.dy();
    auto polish = [&](Point2 p) {
        for (int it = 0; it < 30; ++it) {
            double v = field.eval(p);
            if (std::abs(v) <= polishTolRel * scale) break;
            double gx = fx.eval(p), gy = fy.eval(p);
            double g2 = gx * gx + gy * gy;
            if (g2 < 1e-300) break;
            p.x -= v * gx / g2;
            p.y -= v * gy / g2;
        }
        return p;
    };

    std::vector<PlanarCurve> out;
    for (auto& ch : chains) {
        PlanarCurve c;
        bool closed = ch.size() >= 3 && ch.front() == ch.back();
        std::size_t n = closed ? ch.size() - 1 : ch.size();
        for (std::size_t k = 0; k < n; ++k) {
            Point2 p = polish(cb.points[std::size_t(ch[k])]);
            if (!c.samples.empty() && norm(p - c.samples.back()) < 1e-12) continue;
            c.samples.push_back(p);
        }
        if (closed && c.samples.size() >= 3) {
            c.closed = true;
            c.samples.push_back(c.samples.front());
        }
        if (c.samples.size() >= 2) out.push_back(std::move(c));
    }

    // deterministic order: by first sample, lexicographic
    std::sort(out.begin(), out.end(), [](const PlanarCurve& a, const PlanarCurve& b) {
        if (a.samples[0].x != b.samples[0].x) return a.samples[0].x < b.samples[0].x;
        return a.samples[0].y < b.samples[0].y;
    });
    return out;
}

std::vector<ParabolicTrace> trace_parabolic(const PolySurface& s, Window window,
                                            int resolution) {
    Poly2 h = hessianPoly(s);
    auto curves = trace_zero_set(h, window, resolution);
    std::vector<ParabolicTrace> out;
    Poly2 hx = h.dx(), hy = h.dy();
    for (auto& c : curves) {
        ParabolicTrace t;
        t.jordan = c.closed;
        // probe the hyperbolic side at a few samples
        int votesLeft = 0, votesRight = 0;
        double step = std::max(window.width(), window.height()) / resolution;
        for (std::size_t k = 0; k + 1 < c.samples.size();
             k += std::max<std::size_t>(1, c.samples.size() / 8)) {
            Point2 d = c.samples[k + 1] - c.samples[k];
            double dn = norm(d);
            if (dn == 0) continue;
            Point2 nl = (1.0 / dn) * perp(d);
            Point2 mid = c.samples[k] + 0.5 * (c.samples[k + 1] - c.samples[k]);
            for (double eps = step / 4; eps > step / 64; eps /= 2) {
                double hl = h.eval(mid + eps * nl);
                double hr = h.eval(mid + (-eps) * nl);
                if (hl == hr) continue;
                (hl < hr ? votesLeft : votesRight)++;
                break;
            }
        }
        t.hyperbolicSide =
            votesLeft >= votesRight ? ParabolicTrace::Side::Left : ParabolicTrace::Side::Right;
        t.curve = std::move(c);
        t.curve.tag = "parabolic";
        out.push_back(std::move(t));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Asymptotic directions.

AsymptoticSlopes asymptotic_slopes(const PolySurface& s, Point2 pt) {
    double fxx = s.deriv(2, 0, pt), fxy = s.deriv(1, 1, pt), fyy = s.deriv(0, 2, pt);
    double scale = std::max({std::abs(fxx), std::abs(fxy), std::abs(fyy)});
    if (scale < 1e-14)
        throw AnalysisError("DegenerateJet", "all second partials vanish at the point");
    double disc = fxy * fxy - fxx * fyy;
    AsymptoticSlopes res;
    double tol = 1e-10 * scale * scale;

    auto polishAndStore = [&](Point2 d, int mult) {
        SlopeDir sd = SlopeDir::fromDirection(d);
        // one Newton step in the slope variable
        double a, b, c;
        if (sd.chart == SlopeChart::P) {
            a = fyy;
            b = 2 * fxy;
            c = fxx;
        } else {
            a = fxx;
            b = 2 * fxy;
            c = fyy;
        }
        if (mult == 1) {
            double A = (a * sd.slope + b) * sd.slope + c;
            double Ap = 2 * a * sd.slope + b;
            if (std::abs(Ap) > 1e-12 * scale) sd.slope -= A / Ap;
        }
        res.dirs.push_back(sd);
        res.multiplicity.push_back(mult);
    };

    if (disc > tol) {
        double sq = std::sqrt(disc);
        // two representations per root; keep the better-conditioned one
        auto best = [](Point2 a, Point2 b) { return norm(a) >= norm(b) ? a : b; };
        Point2 d1 = best({fyy, sq - fxy}, {-fxy - sq, fxx});
        Point2 d2 = best({fyy, -sq - fxy}, {sq - fxy, fxx});
        polishAndStore(d1, 1);
        polishAndStore(d2, 1);
    } else if (disc >= -tol) {
        Point2 d = std::abs(fyy) >= std::abs(fxx) ? Point2{fyy, -fxy} : Point2{-fxy, fxx};
        if (norm(d) == 0.0) d = {1, 0};
        polishAndStore(d, 2);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Lifted field and integration.

namespace {

struct FieldEval {
    double A, Ap, I;     // quadratic, its slope-derivative, the cubic form
    Point3 W;            // (dx, dy, dslope)
};

FieldEval liftedField(const PolySurface& s, double x, double y, double sl, SlopeChart ch) {
    Point2 pt{x, y};
    double fxx = s.deriv(2, 0, pt), fxy = s.deriv(1, 1, pt), fyy = s.deriv(0, 2, pt);
    double fxxx = s.deriv(3, 0, pt), fxxy = s.deriv(2, 1, pt), fxyy = s.deriv(1, 2, pt),
           fyyy = s.deriv(0, 3, pt);
    FieldEval e{};
    if (ch == SlopeChart::P) {
        double p = sl;
        e.A = fxx + 2 * fxy * p + fyy * p * p;
        e.Ap = 2 * fxy + 2 * fyy * p;
        double Ax = fxxx + 2 * fxxy * p + fxyy * p * p;
        double Ay = fxxy + 2 * fxyy * p + fyyy * p * p;
        e.I = Ax + p * Ay;
        e.W = {e.Ap, p * e.Ap, -e.I};
    } else {
        double q = sl;
        e.A = fyy + 2 * fxy * q + fxx * q * q;
        e.Ap = 2 * fxy + 2 * fxx * q;
        double Ay = fyyy + 2 * fxyy * q + fxxy * q * q;
        double Ax = fxyy + 2 * fxxy * q + fxxx * q * q;
        e.I = Ay + q * Ax;
        e.W = {q * e.Ap, e.Ap, -e.I};
    }
    return e;
}

// gradient of A in (x, y, slope) for projection back onto the double
Point3 gradA(const PolySurface& s, double x, double y, double sl, SlopeChart ch) {
    Point2 pt{x, y};
    double fxx = s.deriv(2, 0, pt), fxy = s.deriv(1, 1, pt), fyy = s.deriv(0, 2, pt);
    double fxxx = s.deriv(3, 0, pt), fxxy = s.deriv(2, 1, pt), fxyy = s.deriv(1, 2, pt),
           fyyy = s.deriv(0, 3, pt);
    if (ch == SlopeChart::P) {
        double p = sl;
        return {fxxx + 2 * fxxy * p + fxyy * p * p, fxxy + 2 * fxyy * p + fyyy * p * p,
                2 * fxy + 2 * fyy * p};
    }
    double q = sl;
    return {fxyy + 2 * fxxy * q + fxxx * q * q, fyyy + 2 * fxyy * q + fxxy * q * q,
            2 * fxy + 2 * fxx * q};
}

}  // namespace

Point3 lifted_field_eval(const PolySurface& s, const LiftedPoint& lp) {
    FieldEval e = liftedField(s, lp.x, lp.y, lp.slope, lp.chart);
    Jet j2 = eval_jet(s, {lp.x, lp.y}, 2);
    double scale = std::max(j2.scale(), 1.0);
    if (std::abs(e.A) > 1e-6 * scale * (1 + lp.slope * lp.slope))
        throw AnalysisError("OffSurface", "point does not satisfy A = 0");
    return e.W;
}

IntegrationResult integrate_asymptotic(const PolySurface& s, LiftedPoint seed,
                                       double arcLength, Window window, double maxStep) {
    IntegrationResult res;
    if (maxStep <= 0) maxStep = window.diagonal() / 256;

    double x = seed.x, y = seed.y, sl = seed.slope;
    SlopeChart ch = seed.chart;

    auto project = [&]() {
        for (int it = 0; it < 3; ++it) {
            FieldEval e = liftedField(s, x, y, sl, ch);
            Point3 g = gradA(s, x, y, sl, ch);
            double g2 = dot(g, g);
            if (g2 < 1e-300) break;
            double corr = e.A / g2;
            x -= corr * g.x;
            y -= corr * g.y;
            sl -= corr * g.z;
        }
    };
    project();

    // field scale at the seed, for the singular-ball test
    double fieldScale = std::max(norm(liftedField(s, x, y, sl, ch).W), 1e-12);

    auto record = [&]() {
        res.lifted.push_back({x, y, sl, ch});
        res.curve.samples.push_back(s.point3({x, y}));
    };
    record();

    // Cash-Karp embedded RK4(5) on the normalized lifted field
    static const double a21 = 1. / 5;
    static const double a31 = 3. / 40, a32 = 9. / 40;
    static const double a41 = 3. / 10, a42 = -9. / 10, a43 = 6. / 5;
    static const double a51 = -11. / 54, a52 = 5. / 2, a53 = -70. / 27, a54 = 35. / 27;
    static const double a61 = 1631. / 55296, a62 = 175. / 512, a63 = 575. / 13824,
                        a64 = 44275. / 110592, a65 = 253. / 4096;
    static const double b1 = 37. / 378, b3 = 250. / 621, b4 = 125. / 594, b6 = 512. / 1771;
    static const double e1 = b1 - 2825. / 27648, e3 = b3 - 18575. / 48384,
                        e4 = b4 - 13525. / 55296, e5 = -277. / 14336, e6 = b6 - 1. / 4;

    auto fieldAt = [&](double px, double py, double ps) -> Point3 {
        Point3 W = liftedField(s, px, py, ps, ch).W;
        double n = norm(W);
        if (n < 1e-300) return {0, 0, 0};
        return (1.0 / n) * W;
    };

    double h = maxStep / 4;
    double surfArc = 0.0;
    const double tol = 1e-9;
    int steps = 0;
    while (surfArc < arcLength && ++steps < 100000) {
        Point3 k1 = fieldAt(x, y, sl);
        if (norm(liftedField(s, x, y, sl, ch).W) < 1e-8 * fieldScale) {
            res.warnings.push_back({"SingularEncounter",
                                    "trajectory entered the tolerance ball of a lifted-field zero"});
            break;
        }
        Point3 k2 = fieldAt(x + h * a21 * k1.x, y + h * a21 * k1.y, sl + h * a21 * k1.z);
        Point3 k3 = fieldAt(x + h * (a31 * k1.x + a32 * k2.x), y + h * (a31 * k1.y + a32 * k2.y),
                            sl + h * (a31 * k1.z + a32 * k2.z));
        Point3 k4 = fieldAt(x + h * (a41 * k1.x + a42 * k2.x + a43 * k3.x),
                            y + h * (a41 * k1.y + a42 * k2.y + a43 * k3.y),
                            sl + h * (a41 * k1.z + a42 * k2.z + a43 * k3.z));
        Point3 k5 = fieldAt(x + h * (a51 * k1.x + a52 * k2.x + a53 * k3.x + a54 * k4.x),
                            y + h * (a51 * k1.y + a52 * k2.y + a53 * k3.y + a54 * k4.y),
                            sl + h * (a51 * k1.z + a52 * k2.z + a53 * k3.z + a54 * k4.z));
        Point3 k6 = fieldAt(
            x + h * (a61 * k1.x + a62 * k2.x + a63 * k3.x + a64 * k4.x + a65 * k5.x),
            y + h * (a61 * k1.y + a62 * k2.y + a63 * k3.y + a64 * k4.y + a65 * k5.y),
            sl + h * (a61 * k1.z + a62 * k2.z + a63 * k3.z + a64 * k4.z + a65 * k5.z));
        Point3 inc = b1 * k1 + b3 * k3 + b4 * k4 + b6 * k6;
        Point3 errv = e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6;
        double err = h * norm(errv);
        if (err > tol * (1 + std::abs(sl)) && h > 1e-12) {
            h = std::max(h * std::max(0.2, 0.9 * std::pow(tol / err, 0.25)), 1e-12);
            continue;
        }
        Point2 before{x, y};
        double fx = s.deriv(1, 0, before), fy = s.deriv(0, 1, before);
        x += h * inc.x;
        y += h * inc.y;
        sl += h * inc.z;
        project();
        Point2 d{x - before.x, y - before.y};
        surfArc += std::sqrt(d.x * d.x + d.y * d.y +
                             (fx * d.x + fy * d.y) * (fx * d.x + fy * d.y));
        if (err > 0)
            h = std::min(maxStep, h * std::min(5.0, 0.9 * std::pow(tol / err, 0.2)));
        else
            h = std::min(maxStep, h * 2);

        if (std::abs(sl) > 1.5) {
            sl = 1.0 / sl;
            ch = (ch == SlopeChart::P) ? SlopeChart::Q : SlopeChart::P;
        }
        record();
        if (!window.contains({x, y})) break;
    }
    res.curve.tag = "asymptotic";
    return res;
}

// ---------------------------------------------------------------------------
// Curve derivatives and torsion.

void curveDerivatives(const SpaceCurve& c, std::size_t index, int half, Point3& d1,
                      Point3& d2, Point3& d3) {
    int n = static_cast<int>(c.samples.size());
    int m = 2 * half + 1;
    if (n < m) throw AnalysisError("DegenerateFrame", "not enough samples for the stencil");
    int lo = std::clamp(static_cast<int>(index) - half, 0, n - m);
    int ci = static_cast<int>(index) - lo;

    // chord-length parameter, centered at the stencil point and scaled
    std::vector<double> t(m, 0.0);
    for (int k = 1; k < m; ++k)
        t[k] = t[k - 1] + norm(c.samples[lo + k] - c.samples[lo + k - 1]);
    double tc = t[ci];
    double hs = std::max((t[m - 1] - t[0]) / (m - 1), 1e-300);
    for (int k = 0; k < m; ++k) t[k] = (t[k] - tc) / hs;

    // interpolating polynomial through the stencil (Vandermonde solve)
    std::vector<double> M(std::size_t(m) * m);
    for (int r = 0; r < m; ++r) {
        double pw = 1.0;
        for (int cidx = 0; cidx < m; ++cidx) {
            M[std::size_t(r) * m + cidx] = pw;
            pw *= t[r];
        }
    }
    auto solve = [&](std::vector<double> A, std::vector<double> b) {
        for (int col = 0; col < m; ++col) {
            int piv = col;
            for (int r = col + 1; r < m; ++r)
                if (std::abs(A[std::size_t(r) * m + col]) >
                    std::abs(A[std::size_t(piv) * m + col]))
                    piv = r;
            for (int k = 0; k < m; ++k)
                std::swap(A[std::size_t(col) * m + k], A[std::size_t(piv) * m + k]);
            std::swap(b[col], b[piv]);
            double d = A[std::size_t(col) * m + col];
            if (std::abs(d) < 1e-300)
                throw AnalysisError("DegenerateFrame", "singular interpolation stencil");
            for (int r = col + 1; r < m; ++r) {
                double f = A[std::size_t(r) * m + col] / d;
                for (int k = col; k < m; ++k)
                    A[std::size_t(r) * m + k] -= f * A[std::size_t(col) * m + k];
                b[r] -= f * b[col];
            }
        }
        for (int col = m - 1; col >= 0; --col) {
            for (int k = col + 1; k < m; ++k)
                b[col] -= A[std::size_t(col) * m + k] * b[k];
            b[col] /= A[std::size_t(col) * m + col];
        }
        return b;
    };

    std::array<std::vector<double>, 3> coef;
    for (int axis = 0; axis < 3; ++axis) {
        std::vector<double> b(m);
        for (int k = 0; k < m; ++k) {
            const Point3& p = c.samples[lo + k];
            b[k] = axis == 0 ? p.x : axis == 1 ? p.y : p.z;
        }
        coef[axis] = solve(M, std::move(b));
    }
    d1 = {coef[0][1] / hs, coef[1][1] / hs, coef[2][1] / hs};
    d2 = {2 * coef[0][2] / (hs * hs), 2 * coef[1][2] / (hs * hs), 2 * coef[2][2] / (hs * hs)};
    d3 = {6 * coef[0][3] / (hs * hs * hs), 6 * coef[1][3] / (hs * hs * hs),
          6 * coef[2][3] / (hs * hs * hs)};
}

double frenet_torsion(const SpaceCurve& c, std::size_t index) {
    Point3 d1, d2, d3;
    curveDerivatives(c, index, 2, d1, d2, d3);
    Point3 cr = cross(d1, d2);
    double cr2 = dot(cr, cr);
    double d1sq = dot(d1, d1);
    // degeneracy in curvature terms: |d1 x d2| / |d1|^3 below 1e-9
    if (cr2 < 1e-18 * d1sq * d1sq * d1sq)
        throw AnalysisError("DegenerateFrame", "first two derivatives are parallel");
    return det3(d1, d2, d3) / cr2;
}

}  // namespace godron
