#include "godron/godron.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace godron {

namespace {

constexpr double kSqrt3_2 = 0.86602540378443864676;  // sqrt(3)/2
constexpr double kSqrt7_2 = 1.32287565553229529525;  // sqrt(7)/2

struct Quartic {  // f-partials up to order 4 at a point
    double fxx, fxy, fyy;
    double fxxx, fxxy, fxyy, fyyy;
    double f40, f31, f22, f13, f04;
};

Quartic quarticAt(const PolySurface& s, Point2 pt) {
    return {s.deriv(2, 0, pt), s.deriv(1, 1, pt), s.deriv(0, 2, pt),
            s.deriv(3, 0, pt), s.deriv(2, 1, pt), s.deriv(1, 2, pt), s.deriv(0, 3, pt),
            s.deriv(4, 0, pt), s.deriv(3, 1, pt), s.deriv(2, 2, pt), s.deriv(1, 3, pt),
            s.deriv(0, 4, pt)};
}

double cubicForm(const Quartic& q, Point2 d) {
    return q.fxxx * d.x * d.x * d.x + 3 * q.fxxy * d.x * d.x * d.y +
           3 * q.fxyy * d.x * d.y * d.y + q.fyyy * d.y * d.y * d.y;
}

// double asymptotic direction at a parabolic point, longer representation
Point2 doubleRootDir(const Quartic& q) {
    Point2 dP{q.fyy, -q.fxy}, dQ{-q.fxy, q.fxx};
    Point2 d = norm(dP) >= norm(dQ) ? dP : dQ;
    double n = norm(d);
    return n > 0 ? (1.0 / n) * d : Point2{1, 0};
}

// small dense solve (Gaussian elimination, partial pivoting)
bool solveDense(int n, std::vector<double>& A, std::vector<double>& b) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[std::size_t(r) * n + col]) > std::abs(A[std::size_t(piv) * n + col]))
                piv = r;
        if (std::abs(A[std::size_t(piv) * n + col]) < 1e-300) return false;
        for (int k = 0; k < n; ++k)
            std::swap(A[std::size_t(col) * n + k], A[std::size_t(piv) * n + k]);
        std::swap(b[col], b[piv]);
        double d = A[std::size_t(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            double f = A[std::size_t(r) * n + col] / d;
            for (int k = col; k < n; ++k)
                A[std::size_t(r) * n + k] -= f * A[std::size_t(col) * n + k];
            b[r] -= f * b[col];
        }
    }
    for (int col = n - 1; col >= 0; --col) {
        for (int k = col + 1; k < n; ++k) b[col] -= A[std::size_t(col) * n + k] * b[k];
        b[col] /= A[std::size_t(col) * n + col];
    }
    return true;
}

// Newton polish of the 3x3 godron system {A, A_slope, I} in (x, y, slope).
bool polishGodron(const PolySurface& s, double& x, double& y, double& sl, SlopeChart& ch) {
    for (int it = 0; it < 40; ++it) {
        Quartic q = quarticAt(s, {x, y});
        double t = sl;
        double A, Ap, I;
        double Ax, Ay, Apx, Apy, App, Ix, Iy, Ip;
        if (ch == SlopeChart::P) {
            A = q.fxx + 2 * q.fxy * t + q.fyy * t * t;
            Ap = 2 * q.fxy + 2 * q.fyy * t;
            Ax = q.fxxx + 2 * q.fxxy * t + q.fxyy * t * t;
            Ay = q.fxxy + 2 * q.fxyy * t + q.fyyy * t * t;
            I = Ax + t * Ay;
            Apx = 2 * q.fxxy + 2 * q.fxyy * t;
            Apy = 2 * q.fxyy + 2 * q.fyyy * t;
            App = 2 * q.fyy;
            double Axx = q.f40 + 2 * q.f31 * t + q.f22 * t * t;
            double Axy = q.f31 + 2 * q.f22 * t + q.f13 * t * t;
            double Ayy = q.f22 + 2 * q.f13 * t + q.f04 * t * t;
            Ix = Axx + t * Axy;
            Iy = Axy + t * Ayy;
            Ip = Apx + Ay + t * Apy;
        } else {
            A = q.fyy + 2 * q.fxy * t + q.fxx * t * t;
            Ap = 2 * q.fxy + 2 * q.fxx * t;
            Ay = q.fyyy + 2 * q.fxyy * t + q.fxxy * t * t;
            Ax = q.fxyy + 2 * q.fxxy * t + q.fxxx * t * t;
            I = Ay + t * Ax;
            Apy = 2 * q.fxyy + 2 * q.fxxy * t;
            Apx = 2 * q.fxxy + 2 * q.fxxx * t;
            App = 2 * q.fxx;
            double Ayy = q.f04 + 2 * q.f13 * t + q.f22 * t * t;
            double Axy = q.f13 + 2 * q.f22 * t + q.f31 * t * t;
            double Axx = q.f22 + 2 * q.f31 * t + q.f40 * t * t;
            Iy = Ayy + t * Axy;
            Ix = Axy + t * Axx;
            Ip = Apy + Ax + t * Apx;
        }
        double scale = std::max({std::abs(q.fxx), std::abs(q.fxy), std::abs(q.fyy),
                                 std::abs(q.fxxx), std::abs(q.fxxy), std::abs(q.fxyy),
                                 std::abs(q.fyyy), 1.0});
        if (std::max({std::abs(A), std::abs(Ap), std::abs(I)}) < 1e-12 * scale) return true;
        std::vector<double> J, rhs;
        if (ch == SlopeChart::P) {
            J = {Ax, Ay, Ap, Apx, Apy, App, Ix, Iy, Ip};
        } else {
            // unknown order (y, x, slope) in the Q chart
            J = {Ay, Ax, Ap, Apy, Apx, App, Iy, Ix, Ip};
        }
        rhs = {-A, -Ap, -I};
        if (!solveDense(3, J, rhs)) return false;
        if (ch == SlopeChart::P) {
            x += rhs[0];
            y += rhs[1];
        } else {
            y += rhs[0];
            x += rhs[1];
        }
        sl += rhs[2];
        if (std::abs(rhs[0]) + std::abs(rhs[1]) + std::abs(rhs[2]) > 0.5) return false;
        if (std::abs(sl) > 1.5) {
            sl = 1.0 / sl;
            ch = ch == SlopeChart::P ? SlopeChart::Q : SlopeChart::P;
        }
    }
    return false;
}

void polishParabolic(const Poly2& h, const Poly2& hx, const Poly2& hy, Point2& p,
                     double tolAbs) {
    for (int it = 0; it < 30; ++it) {
        double v = h.eval(p);
        if (std::abs(v) < tolAbs) return;
        double gx = hx.eval(p), gy = hy.eval(p);
        double g2 = gx * gx + gy * gy;
        if (g2 < 1e-300) return;
        p.x -= v * gx / g2;
        p.y -= v * gy / g2;
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Detection.

std::vector<GodronSeed> find_godrons_on(const PolySurface& s,
                                        const std::vector<ParabolicTrace>& traces) {
    std::vector<GodronSeed> out;
    Poly2 h = hessianPoly(s);
    Poly2 hx = h.dx(), hy = h.dy();
    double hScale = std::max(h.maxAbsCoeff(), 1e-300);

    for (const auto& tr : traces) {
        const auto& pts = tr.curve.samples;
        if (pts.size() < 2) continue;
        // oriented double-asymptotic direction and cubic form along the trace
        std::vector<double> G(pts.size());
        std::vector<Point2> dir(pts.size());
        Point2 prev{0, 0};
        for (std::size_t k = 0; k < pts.size(); ++k) {
            Quartic q = quarticAt(s, pts[k]);
            Point2 d = doubleRootDir(q);
            if (k > 0 && dot(d, prev) < 0) d = -1.0 * d;
            dir[k] = d;
            prev = d;
            G[k] = cubicForm(q, d);
        }
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            if (G[k] == 0.0 && G[k + 1] == 0.0) continue;
            if (G[k] * G[k + 1] > 0) continue;
            // bisect along the segment, re-polished onto the curve
            Point2 lo = pts[k], hi = pts[k + 1];
            Point2 ref = dir[k];
            double Glo = G[k];
            for (int it = 0; it < 40; ++it) {
                Point2 mid = lo + 0.5 * (hi - lo);
                polishParabolic(h, hx, hy, mid, 1e-13 * hScale);
                Quartic q = quarticAt(s, mid);
                Point2 d = doubleRootDir(q);
                if (dot(d, ref) < 0) d = -1.0 * d;
                double Gm = cubicForm(q, d);
                if (Glo * Gm <= 0)
                    hi = mid;
                else {
                    lo = mid;
                    Glo = Gm;
                }
                ref = d;
            }
            Point2 cand = lo + 0.5 * (hi - lo);
            Quartic q = quarticAt(s, cand);
            SlopeDir sd = SlopeDir::fromDirection(doubleRootDir(q));
            double x = cand.x, y = cand.y, sl = sd.slope;
            SlopeChart ch = sd.chart;
            if (!polishGodron(s, x, y, sl, ch)) continue;  // divergence: skip the seed
            if (norm(Point2{x, y} - cand) > 0.1) continue;  // ran away
            out.push_back({{x, y}, {ch, sl}});
        }
    }
    std::sort(out.begin(), out.end(), [](const GodronSeed& a, const GodronSeed& b) {
        if (a.location.x != b.location.x) return a.location.x < b.location.x;
        return a.location.y < b.location.y;
    });
    std::vector<GodronSeed> dedup;
    for (const auto& g : out) {
        bool dup = false;
        for (const auto& e : dedup)
            if (norm(e.location - g.location) < 1e-7) dup = true;
        if (!dup) dedup.push_back(g);
    }
    return dedup;
}

std::vector<GodronSeed> find_godrons(const PolySurface& s, Window window, int resolution) {
    return find_godrons_on(s, trace_parabolic(s, window, resolution));
}

// ---------------------------------------------------------------------------
// Index.

IndexResult godron_index(const PolySurface& s, const GodronSeed& g) {
    IndexResult res;
    bool qChart = g.slope.chart == SlopeChart::Q;
    double x0 = qChart ? g.location.y : g.location.x;
    double base2 = qChart ? g.location.x : g.location.y;
    double p0 = g.slope.slope;

    // lifted field V = (A_slope, -(A_base + slope A_transverse)) in the
    // (base, slope) chart of the double; the transverse coordinate is
    // solved from A = 0
    auto fieldAt = [&](double x, double p, double& yState) -> Point2 {
        for (int it = 0; it < 20; ++it) {
            Point2 pt = qChart ? Point2{yState, x} : Point2{x, yState};
            Quartic q = quarticAt(s, pt);
            double A, At;
            if (!qChart) {
                A = q.fxx + 2 * q.fxy * p + q.fyy * p * p;
                At = q.fxxy + 2 * q.fxyy * p + q.fyyy * p * p;
            } else {
                A = q.fyy + 2 * q.fxy * p + q.fxx * p * p;
                At = q.fxyy + 2 * q.fxxy * p + q.fxxx * p * p;
            }
            if (std::abs(At) < 1e-300) break;
            double corr = A / At;
            yState -= corr;
            if (std::abs(corr) < 1e-15 * (1 + std::abs(yState))) break;
        }
        Point2 pt = qChart ? Point2{yState, x} : Point2{x, yState};
        Quartic q = quarticAt(s, pt);
        if (!qChart) {
            double Ap = 2 * q.fxy + 2 * q.fyy * p;
            double Ax = q.fxxx + 2 * q.fxxy * p + q.fxyy * p * p;
            double Ay = q.fxxy + 2 * q.fxyy * p + q.fyyy * p * p;
            return {Ap, -(Ax + p * Ay)};
        }
        double Ap = 2 * q.fxy + 2 * q.fxx * p;
        double Ay = q.fyyy + 2 * q.fxyy * p + q.fxxy * p * p;
        double Ax = q.fxyy + 2 * q.fxxy * p + q.fxxx * p * p;
        return {Ap, -(Ay + p * Ax)};
    };

    auto windingAt = [&](double r, bool& ok) -> int {
        const int N = 96;
        double total = 0, prevAngle = 0;
        double yState = base2;
        ok = true;
        for (int k = 0; k <= N; ++k) {
            double th = 2 * M_PI * k / N;
            Point2 V = fieldAt(x0 + r * std::cos(th), p0 + r * std::sin(th), yState);
            if (norm(V) < 1e-14) {
                ok = false;
                return 0;
            }
            double a = std::atan2(V.y, V.x);
            if (k > 0) {
                double da = a - prevAngle;
                while (da > M_PI) da -= 2 * M_PI;
                while (da < -M_PI) da += 2 * M_PI;
                total += da;
            }
            prevAngle = a;
        }
        double w = total / (2 * M_PI);
        int wi = static_cast<int>(std::lround(w));
        if (std::abs(w - wi) > 0.1) ok = false;
        return wi;
    };

    int agree = 0, lastW = 0;
    for (double r = 1e-3; r < 1.0 && agree < 3; r *= 2) {
        bool ok = false;
        int w = windingAt(r, ok);
        if (!ok) {
            agree = 0;
            continue;
        }
        if (agree > 0 && w == lastW)
            ++agree;
        else
            agree = 1;
        lastW = w;
    }
    res.winding = lastW;

    // exact linearization of the chart field at the singular point
    {
        Quartic q = quarticAt(s, g.location);
        double t = p0;
        double Apx, Apy, App, Axx, Axy, Ayy, Ay;
        if (!qChart) {
            Apx = 2 * q.fxxy + 2 * q.fxyy * t;
            Apy = 2 * q.fxyy + 2 * q.fyyy * t;
            App = 2 * q.fyy;
            Axx = q.f40 + 2 * q.f31 * t + q.f22 * t * t;
            Axy = q.f31 + 2 * q.f22 * t + q.f13 * t * t;
            Ayy = q.f22 + 2 * q.f13 * t + q.f04 * t * t;
            Ay = q.fxxy + 2 * q.fxyy * t + q.fyyy * t * t;
        } else {
            Apx = 2 * q.fxyy + 2 * q.fxxy * t;
            Apy = 2 * q.fxxy + 2 * q.fxxx * t;
            App = 2 * q.fxx;
            Axx = q.f04 + 2 * q.f13 * t + q.f22 * t * t;
            Axy = q.f13 + 2 * q.f22 * t + q.f31 * t * t;
            Ayy = q.f22 + 2 * q.f31 * t + q.f40 * t * t;
            Ay = q.fxyy + 2 * q.fxxy * t + q.fxxx * t * t;
        }
        double J11 = Apx + t * Apy;
        double J12 = App;
        double J21 = -(Axx + 2 * t * Axy + t * t * Ayy);
        double J22 = -(Apx + Ay + t * Apy);
        double det = J11 * J22 - J12 * J21;
        res.detSign = det > 0 ? 1 : det < 0 ? -1 : 0;
    }
    res.index = res.winding != 0 ? res.winding : res.detSign;
    res.consistent = (res.winding == res.detSign);
    return res;
}

// ---------------------------------------------------------------------------
// Classification.

ClassLabels classify_godron(double rho, double gate) {
    if (std::abs(rho) < gate)
        throw AnalysisError("DegenerateRho", "rho within the flec-godron gate");
    if (std::abs(rho - 1) < gate)
        throw AnalysisError("DegenerateRho", "rho within the bigodron gate");
    ClassLabels L;
    auto in = [&](double lo, double hi) { return rho > lo && rho < hi; };
    const double inf = std::numeric_limits<double>::infinity();

    if (in(1, inf)) L.sixConfig = "(1,inf)";
    else if (in(2.0 / 3, 1)) L.sixConfig = "(2/3,1)";
    else if (in(0.5, 2.0 / 3)) L.sixConfig = "(1/2,2/3)";
    else if (in(0, 0.5)) L.sixConfig = "(0,1/2)";
    else if (in(-0.5, 0)) L.sixConfig = "(-1/2,0)";
    else L.sixConfig = "(-inf,-1/2)";

    if (in(4.0 / 3, inf)) L.contourConfig = "(4/3,inf)";
    else if (in(kSqrt7_2, 4.0 / 3)) L.contourConfig = "(sqrt7/2,4/3)";
    else if (in(1, kSqrt7_2)) L.contourConfig = "(1,sqrt7/2)";
    else if (in(0, 1)) L.contourConfig = "(0,1)";
    else if (in(-0.5, 0)) L.contourConfig = "(-1/2,0)";
    else if (in(-kSqrt7_2, -0.5)) L.contourConfig = "(-sqrt7/2,-1/2)";
    else L.contourConfig = "(-inf,-sqrt7/2)";

    if (in(1, inf)) L.sectionConfig = "(1,inf)";
    else if (in(8.0 / 9, 1)) L.sectionConfig = "(8/9,1)";
    else if (in(kSqrt3_2, 8.0 / 9)) L.sectionConfig = "(sqrt3/2,8/9)";
    else if (in(0, kSqrt3_2)) L.sectionConfig = "(0,sqrt3/2)";
    else if (in(-0.5, 0)) L.sectionConfig = "(-1/2,0)";
    else if (in(-kSqrt3_2, -0.5)) L.sectionConfig = "(-sqrt3/2,-1/2)";
    else L.sectionConfig = "(-inf,-sqrt3/2)";

    if (in(1, inf)) L.swallowtail4 = "e";
    else if (in(0, 1)) L.swallowtail4 = "h1";
    else if (in(-0.5, 0)) L.swallowtail4 = "h2";
    else L.swallowtail4 = "h3";

    if (in(4.0 / 3, inf)) L.swallowtail7 = "e1";
    else if (in(kSqrt7_2, 4.0 / 3)) L.swallowtail7 = "e2";
    else if (in(1, kSqrt7_2)) L.swallowtail7 = "e3";
    else if (in(0, 1)) L.swallowtail7 = "h1";
    else if (in(-0.5, 0)) L.swallowtail7 = "h2";
    else if (in(-kSqrt7_2, -0.5)) L.swallowtail7 = "h31";
    else L.swallowtail7 = "h32";

    if (in(1, inf)) L.sContour6 = "trivial";
    else if (in(8.0 / 9, 1)) L.sContour6 = "h11";
    else if (in(kSqrt3_2, 8.0 / 9)) L.sContour6 = "h12";
    else if (in(0, kSqrt3_2)) L.sContour6 = "h13";
    else if (in(-0.5, 0)) L.sContour6 = "h2";
    else if (in(-kSqrt3_2, -0.5)) L.sContour6 = "h31";
    else L.sContour6 = "h32";

    L.convexity = rho > 2.0 / 3 ? "hyperbolic-convex" : "elliptic-convex";

    const std::pair<double, const char*> thresholds[] = {
        {-kSqrt7_2, "-sqrt7/2"}, {-kSqrt3_2, "-sqrt3/2"}, {-0.5, "-1/2"}, {0.0, "0"},
        {0.5, "1/2"},            {2.0 / 3, "2/3"},        {8.0 / 9, "8/9"},
        {kSqrt3_2, "sqrt3/2"},   {1.0, "1"},              {kSqrt7_2, "sqrt7/2"},
        {4.0 / 3, "4/3"}};
    for (auto& [v, name] : thresholds)
        if (std::abs(rho - v) < 1e-6) L.boundaryFlags.push_back(name);
    return L;
}

// ---------------------------------------------------------------------------
// Fitting.

FitResult canonical_fit(const PlanarCurve& chartCurve, double halfWidth) {
    auto fitAt = [&](double h, bool& ok) -> std::pair<double, double> {
        double s4 = 0, s5 = 0, s6 = 0, b2 = 0, b3 = 0;
        int n = 0;
        for (const Point2& p : chartCurve.samples) {
            if (std::abs(p.x) > h || p.x == 0.0) continue;
            double u2 = p.x * p.x;
            s4 += u2 * u2;
            s5 += u2 * u2 * p.x;
            s6 += u2 * u2 * u2;
            b2 += p.y * u2;
            b3 += p.y * u2 * p.x;
            ++n;
        }
        ok = n >= 6;
        if (!ok) return {0, 0};
        double det = s4 * s6 - s5 * s5;
        if (std::abs(det) < 1e-300) {
            ok = false;
            return {0, 0};
        }
        return {(b2 * s6 - s5 * b3) / det, (s4 * b3 - b2 * s5) / det};
    };
    bool okH = false, okH2 = false;
    auto [c2h, c3h] = fitAt(halfWidth, okH);
    auto [c2h2, c3h2] = fitAt(halfWidth / 2, okH2);
    if (!okH || !okH2)
        throw AnalysisError("InsufficientSamples", "not enough samples in the fit window");
    FitResult r;
    r.value = (4 * c2h2 - c2h) / 3;
    r.error = std::abs(c2h2 - c2h) / 3;
    r.cubic = (4 * c3h2 - c3h) / 3;
    return r;
}

// ---------------------------------------------------------------------------
// Context.

GodronContext prepare_godron(const PolySurface& s, const GodronSeed& g,
                             double fitHalfWidth) {
    GodronContext ctx;
    ctx.seed = g;
    auto [chart, jet] = adapted_chart(s, g.location, g.slope, 6);
    ctx.chart = chart;
    ctx.jet = jet;
    double fvv = jet.p(0, 2), fuuv = jet.p(2, 1), fuuuu = jet.p(4, 0);
    if (std::abs(fuuv) < 1e-12 * jet.scale())
        throw AnalysisError("DegenerateHessian", "f_uuv vanishes in the adapted chart");
    ctx.alphaHat = -fuuv / (2 * fvv);
    ctx.rhoJet = fvv * fuuuu / (3 * fuuv * fuuv);
    ctx.fitHalfWidth = fitHalfWidth;
    return ctx;
}

namespace {

// parabolic: {hess = 0, chartU = u}, unknowns (x, y)
bool solveParabolicAtU(const GodronContext& ctx, const Poly2& h, const Poly2& hx,
                       const Poly2& hy, double u, Point2& p, double tolAbs) {
    double d = ctx.chart.det();
    double invX = ctx.chart.linearMap[3] / d, invY = -ctx.chart.linearMap[2] / d;
    for (int it = 0; it < 40; ++it) {
        double F1 = h.eval(p);
        double F2 = ctx.chart.toChart(p).x - u;
        if (std::abs(F1) < tolAbs && std::abs(F2) < 1e-14 * (1 + std::abs(u))) return true;
        std::vector<double> J = {hx.eval(p), hy.eval(p), invX, invY};
        std::vector<double> rhs = {-F1, -F2};
        if (!solveDense(2, J, rhs)) return false;
        p.x += rhs[0];
        p.y += rhs[1];
        if (std::abs(rhs[0]) + std::abs(rhs[1]) > 10 * ctx.fitHalfWidth) return false;
    }
    return false;
}

// flecnodal: {A = 0, I = 0, chartU = u}, unknowns (x, y, slope)
bool solveFlecnodalAtU(const PolySurface& s, const GodronContext& ctx, double u, double& x,
                       double& y, double& sl, SlopeChart& ch) {
    double d = ctx.chart.det();
    double invX = ctx.chart.linearMap[3] / d, invY = -ctx.chart.linearMap[2] / d;
    for (int it = 0; it < 40; ++it) {
        Quartic q = quarticAt(s, {x, y});
        double t = sl;
        double A, Ax, Ay, Ap, I, Ix, Iy, Ip;
        if (ch == SlopeChart::P) {
            A = q.fxx + 2 * q.fxy * t + q.fyy * t * t;
            Ax = q.fxxx + 2 * q.fxxy * t + q.fxyy * t * t;
            Ay = q.fxxy + 2 * q.fxyy * t + q.fyyy * t * t;
            Ap = 2 * q.fxy + 2 * q.fyy * t;
            I = q.fxxx + 3 * q.fxxy * t + 3 * q.fxyy * t * t + q.fyyy * t * t * t;
            Ix = q.f40 + 3 * q.f31 * t + 3 * q.f22 * t * t + q.f13 * t * t * t;
            Iy = q.f31 + 3 * q.f22 * t + 3 * q.f13 * t * t + q.f04 * t * t * t;
            Ip = 3 * q.fxxy + 6 * q.fxyy * t + 3 * q.fyyy * t * t;
        } else {
            A = q.fyy + 2 * q.fxy * t + q.fxx * t * t;
            Ay = q.fyyy + 2 * q.fxyy * t + q.fxxy * t * t;
            Ax = q.fxyy + 2 * q.fxxy * t + q.fxxx * t * t;
            Ap = 2 * q.fxy + 2 * q.fxx * t;
            I = q.fyyy + 3 * q.fxyy * t + 3 * q.fxxy * t * t + q.fxxx * t * t * t;
            Iy = q.f04 + 3 * q.f13 * t + 3 * q.f22 * t * t + q.f31 * t * t * t;
            Ix = q.f13 + 3 * q.f22 * t + 3 * q.f31 * t * t + q.f40 * t * t * t;
            Ip = 3 * q.fxyy + 6 * q.fxxy * t + 3 * q.fxxx * t * t;
        }
        double F3 = ctx.chart.toChart({x, y}).x - u;
        double scale = std::max(1.0, std::abs(q.fxx) + std::abs(q.fxy) + std::abs(q.fyy));
        if (std::abs(A) < 1e-13 * scale && std::abs(I) < 1e-12 * scale &&
            std::abs(F3) < 1e-14 * (1 + std::abs(u)))
            return true;
        std::vector<double> J = {Ax, Ay, Ap, Ix, Iy, Ip, invX, invY, 0};
        std::vector<double> rhs = {-A, -I, -F3};
        if (!solveDense(3, J, rhs)) return false;
        x += rhs[0];
        y += rhs[1];
        sl += rhs[2];
        if (std::abs(rhs[0]) + std::abs(rhs[1]) > 10 * ctx.fitHalfWidth) return false;
        if (std::abs(sl) > 1.5) {
            sl = 1.0 / sl;
            ch = ch == SlopeChart::P ? SlopeChart::Q : SlopeChart::P;
        }
    }
    return false;
}

// bitangency: {grad f equal, planarity, chartU(a) = u}, unknowns (a, b)
bool solveConodalAtU(const PolySurface& s, const GodronContext& ctx, double u, Point2& a,
                     Point2& b) {
    double d = ctx.chart.det();
    double invX = ctx.chart.linearMap[3] / d, invY = -ctx.chart.linearMap[2] / d;
    for (int it = 0; it < 60; ++it) {
        double fxA = s.deriv(1, 0, a), fyA = s.deriv(0, 1, a);
        double fxB = s.deriv(1, 0, b), fyB = s.deriv(0, 1, b);
        double fA = s.eval(a), fB = s.eval(b);
        double hxxA = s.deriv(2, 0, a), hxyA = s.deriv(1, 1, a), hyyA = s.deriv(0, 2, a);
        double hxxB = s.deriv(2, 0, b), hxyB = s.deriv(1, 1, b), hyyB = s.deriv(0, 2, b);
        Point2 ab = a - b;
        double F1 = fxA - fxB;
        double F2 = fyA - fyB;
        double F3 = fA - fB - (fxA * ab.x + fyA * ab.y);
        double F4 = ctx.chart.toChart(a).x - u;
        double scale = 1 + std::abs(fxA) + std::abs(fyA);
        if (std::abs(F1) + std::abs(F2) < 1e-13 * scale && std::abs(F3) < 1e-13 * scale &&
            std::abs(F4) < 1e-13 * (1 + std::abs(u)))
            return true;
        std::vector<double> J = {hxxA, hxyA, -hxxB, -hxyB,
                                 hxyA, hyyA, -hxyB, -hyyB,
                                 -(hxxA * ab.x + hxyA * ab.y), -(hxyA * ab.x + hyyA * ab.y),
                                 fxA - fxB, fyA - fyB,
                                 invX, invY, 0, 0};
        std::vector<double> rhs = {-F1, -F2, -F3, -F4};
        if (!solveDense(4, J, rhs)) return false;
        a.x += rhs[0];
        a.y += rhs[1];
        b.x += rhs[2];
        b.y += rhs[3];
        double stepn =
            std::abs(rhs[0]) + std::abs(rhs[1]) + std::abs(rhs[2]) + std::abs(rhs[3]);
        if (stepn > 20 * ctx.fitHalfWidth) return false;
    }
    return false;
}

}  // namespace

PlanarCurve local_parabolic(const PolySurface& s, const GodronContext& ctx) {
    Poly2 h = hessianPoly(s);
    Poly2 hx = h.dx(), hy = h.dy();
    double tolAbs = 1e-14 * std::max(h.maxAbsCoeff(), 1.0);
    double cP = ctx.alphaHat * (3 * ctx.rhoJet - 2);
    const int K = 24;
    std::vector<std::pair<double, Point2>> pts;
    for (int sgn : {-1, 1}) {
        bool havePrev = false;
        Point2 prev;
        for (int k = 1; k <= K; ++k) {
            double u = sgn * ctx.fitHalfWidth * k / K;
            Point2 p = havePrev ? prev : ctx.chart.toAmbient({u, cP * u * u});
            if (!solveParabolicAtU(ctx, h, hx, hy, u, p, tolAbs)) {
                p = ctx.chart.toAmbient({u, cP * u * u});
                if (!solveParabolicAtU(ctx, h, hx, hy, u, p, tolAbs)) {
                    havePrev = false;
                    continue;
                }
            }
            pts.emplace_back(u, p);
            prev = p;
            havePrev = true;
        }
    }
    pts.emplace_back(0.0, ctx.seed.location);
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    PlanarCurve curve;
    curve.tag = "parabolic-local";
    for (auto& [u, p] : pts) {
        curve.samples.push_back(p);
        curve.params.push_back(u);
    }
    return curve;
}

PlanarCurve local_flecnodal(const PolySurface& s, const GodronContext& ctx) {
    double cF = ctx.alphaHat * ctx.rhoJet * (2 * ctx.rhoJet - 1);
    double slopeRate = 2 * ctx.rhoJet * ctx.alphaHat;  // chart slope of the
                                                       // asymptotic line along F
    const int K = 24;
    std::vector<std::pair<double, Point2>> pts;
    for (int sgn : {-1, 1}) {
        bool havePrev = false;
        double px = 0, py = 0, psl = 0;
        SlopeChart pch = SlopeChart::P;
        for (int k = 1; k <= K; ++k) {
            double u = sgn * ctx.fitHalfWidth * k / K;
            double x, y, sl;
            SlopeChart ch;
            if (havePrev) {
                x = px;
                y = py;
                sl = psl;
                ch = pch;
            } else {
                Point2 amb = ctx.chart.toAmbient({u, cF * u * u});
                x = amb.x;
                y = amb.y;
                Point2 dirChart{1.0, slopeRate * u};
                Point2 dirAmb{
                    ctx.chart.linearMap[0] * dirChart.x + ctx.chart.linearMap[2] * dirChart.y,
                    ctx.chart.linearMap[1] * dirChart.x + ctx.chart.linearMap[3] * dirChart.y};
                SlopeDir sd = SlopeDir::fromDirection(dirAmb);
                sl = sd.slope;
                ch = sd.chart;
            }
            if (!solveFlecnodalAtU(s, ctx, u, x, y, sl, ch)) {
                havePrev = false;
                continue;
            }
            pts.emplace_back(u, Point2{x, y});
            px = x;
            py = y;
            psl = sl;
            pch = ch;
            havePrev = true;
        }
    }
    pts.emplace_back(0.0, ctx.seed.location);
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    PlanarCurve curve;
    curve.tag = "flecnodal-local";
    for (auto& [u, p] : pts) {
        curve.samples.push_back(p);
        curve.params.push_back(u);
    }
    return curve;
}

PlanarCurve trace_conodal_local(const PolySurface& s, const GodronContext& ctx,
                                std::string* failure) {
    double cD = ctx.alphaHat * ctx.rhoJet;
    const int K = 16;
    std::vector<std::pair<double, Point2>> pts;
    int failures = 0, attempts = 0;
    for (int sgn : {-1, 1}) {
        // march outward from u = h/4 to h, then inward toward the godron
        std::vector<int> order;
        for (int k = K / 4; k <= K; ++k) order.push_back(k);
        for (int k = K / 4 - 1; k >= 1; --k) order.push_back(k);
        bool havePrev = false;
        Point2 pa, pb;
        for (std::size_t idx = 0; idx < order.size(); ++idx) {
            int k = order[idx];
            if (idx == std::size_t(K - K / 4 + 1)) havePrev = false;  // restart inward
            double u = sgn * ctx.fitHalfWidth * k / K;
            Point2 a, b;
            if (havePrev) {
                a = pa;
                b = pb;
            } else {
                a = ctx.chart.toAmbient({u, cD * u * u});
                b = ctx.chart.toAmbient({-u, cD * u * u});
            }
            ++attempts;
            if (!solveConodalAtU(s, ctx, u, a, b) ||
                norm(a - b) < 0.5 * std::abs(u)) {
                ++failures;
                havePrev = false;
                continue;
            }
            pts.emplace_back(u, a);
            pa = a;
            pb = b;
            havePrev = true;
        }
    }
    if (attempts == 0 || failures > attempts / 2) {
        if (failure) *failure = "SeedFailure";
        return {};
    }
    pts.emplace_back(0.0, ctx.seed.location);
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    PlanarCurve curve;
    curve.tag = "conodal-local";
    for (auto& [u, p] : pts) {
        curve.samples.push_back(p);
        curve.params.push_back(u);
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Separating 2-jet.

double separating_jet(const PolySurface& s, const GodronContext& ctx) {
    Point2 g = ctx.seed.location;
    Jet j = eval_jet(s, g, 3);
    double fxx = j.p(2, 0), fxy = j.p(1, 1), fyy = j.p(0, 2);
    double fxxx = j.p(3, 0), fxxy = j.p(2, 1), fxyy = j.p(1, 2), fyyy = j.p(0, 3);

    Point2 m1 = ctx.chart.colU(), m2 = ctx.chart.colV();

    // dual coordinates G = (f_x, f_y, x f_x + y f_y - f): the t^2 term of
    // the dual image of t -> chart(t, c t^2) is q_c = H_G[m1,m1]/2 + c DG m2,
    // linear in c and parallel to the common cusp tangent for c != cS
    auto grads = [&](int which) -> Point2 {
        switch (which) {
            case 0: return {fxx, fxy};
            case 1: return {fxy, fyy};
            default: return {g.x * fxx + g.y * fxy, g.x * fxy + g.y * fyy};
        }
    };
    auto hessQuad = [&](int which, Point2 d) -> double {
        double hxx, hxy, hyy;
        switch (which) {
            case 0: hxx = fxxx; hxy = fxxy; hyy = fxyy; break;
            case 1: hxx = fxxy; hxy = fxyy; hyy = fyyy; break;
            default:
                hxx = fxx + g.x * fxxx + g.y * fxxy;
                hxy = fxy + g.x * fxxy + g.y * fxyy;
                hyy = fyy + g.x * fxyy + g.y * fyyy;
        }
        return hxx * d.x * d.x + 2 * hxy * d.x * d.y + hyy * d.y * d.y;
    };

    Point3 halfH{0.5 * hessQuad(0, m1), 0.5 * hessQuad(1, m1), 0.5 * hessQuad(2, m1)};
    Point3 Jm2{dot(grads(0), m2), dot(grads(1), m2), dot(grads(2), m2)};
    double jn = norm(Jm2);
    if (jn < 1e-300) throw AnalysisError("NoSignChange", "degenerate common cusp tangent");
    Point3 uDir = (1.0 / jn) * Jm2;

    auto signFn = [&](double c) { return dot(halfH, uDir) + c * dot(Jm2, uDir); };

    double B = 8 * std::max(1.0, std::abs(ctx.alphaHat));
    for (int expand = 0; expand < 4; ++expand) {
        double lo = -B, hi = B;
        double slo = signFn(lo), shi = signFn(hi);
        if (slo == 0.0) return lo;
        if (shi == 0.0) return hi;
        if (slo * shi < 0) {
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                double sm = signFn(mid);
                if (sm == 0.0) return mid;
                if (slo * sm < 0)
                    hi = mid;
                else {
                    lo = mid;
                    slo = sm;
                }
            }
            return 0.5 * (lo + hi);
        }
        B *= 8;
    }
    throw AnalysisError("NoSignChange", "no cusp-direction flip in the expanded bracket");
}

// ---------------------------------------------------------------------------
// cr-invariant.

RhoResult cr_invariant(const PolySurface& s, const GodronContext& ctx) {
    RhoResult out;
    double cS = separating_jet(s, ctx);
    out.coeffs.cS = cS;

    auto toChartCurve = [&](const PlanarCurve& amb) {
        PlanarCurve c;
        c.samples.reserve(amb.samples.size());
        for (const Point2& p : amb.samples) c.samples.push_back(ctx.chart.toChart(p));
        return c;
    };

    FitResult fP = canonical_fit(toChartCurve(local_parabolic(s, ctx)), ctx.fitHalfWidth);
    out.coeffs.cP = fP.value;
    FitResult fF = canonical_fit(toChartCurve(local_flecnodal(s, ctx)), ctx.fitHalfWidth);
    out.coeffs.cF = fF.value;

    std::string conodalFailure;
    PlanarCurve dn = trace_conodal_local(s, ctx, &conodalFailure);
    std::optional<double> cD;
    if (!dn.empty()) {
        FitResult fD = canonical_fit(toChartCurve(dn), ctx.fitHalfWidth);
        cD = fD.value;
        out.coeffs.cD = fD.value;
    }

    RhoDiagnostics& d = out.diagnostics;
    d.rhoJet = ctx.rhoJet;
    d.rhoParabolic = (fP.value / cS + 2) / 3;
    {
        double disc = 1 + 8 * fF.value / cS;
        double sq = disc > 0 ? std::sqrt(disc) : 0.0;
        double r1 = (1 + sq) / 4, r2 = (1 - sq) / 4;
        d.rhoFlecnodal =
            std::abs(r1 - d.rhoParabolic) <= std::abs(r2 - d.rhoParabolic) ? r1 : r2;
    }
    if (cD) d.rhoCrossRatio = (fF.value - *cD) / (fP.value - *cD);

    out.rho = d.rhoCrossRatio ? *d.rhoCrossRatio : d.rhoParabolic;
    double dev = std::abs(d.rhoParabolic - d.rhoFlecnodal);
    if (d.rhoCrossRatio) {
        dev = std::max(dev, std::abs(d.rhoParabolic - *d.rhoCrossRatio));
        dev = std::max(dev, std::abs(d.rhoFlecnodal - *d.rhoCrossRatio));
    }
    d.maxPairwiseDeviation = dev;
    d.warned = dev > 1e-3;
    d.inconsistent = dev > 0.05;
    return out;
}

// ---------------------------------------------------------------------------
// Tangent section and g-contour.

namespace {

LocalBranches traceChartBranches(const Poly2& field, const GodronContext& ctx, double cMinus,
                                 double cPlus, bool expectTrivial) {
    LocalBranches out;
    Poly2 dv = field.dy();
    const int K = 24;
    double h = ctx.fitHalfWidth;

    if (expectTrivial) {
        // verify no zero of the field in the scaled band around the origin
        double band = 8 * std::max(1.0, std::abs(ctx.alphaHat));
        bool found = false;
        for (int k = -K; k <= K && !found; ++k) {
            if (k == 0) continue;
            double u = h * k / K;
            double vmax = band * u * u;
            double prev = field.eval({u, -vmax});
            for (int m = 1; m <= 400; ++m) {
                double v = -vmax + 2 * vmax * m / 400;
                double cur = field.eval({u, v});
                if (prev * cur < 0) {
                    found = true;
                    break;
                }
                prev = cur;
            }
        }
        out.trivial = !found;
        return out;
    }

    double gap = std::abs(cPlus - cMinus);
    auto traceBranch = [&](double c0, PlanarCurve& curve) -> std::optional<double> {
        std::vector<std::pair<double, Point2>> pts;
        for (int sgn : {-1, 1}) {
            double prevV = 0;
            bool havePrev = false;
            for (int k = 1; k <= K; ++k) {
                double u = sgn * h * k / K;
                double v = havePrev ? prevV : c0 * u * u;
                bool ok = false;
                for (int it = 0; it < 40; ++it) {
                    double F = field.eval({u, v});
                    double dF = dv.eval({u, v});
                    if (std::abs(dF) < 1e-300) break;
                    double step = F / dF;
                    v -= step;
                    if (std::abs(step) < 1e-16 * (1 + std::abs(v))) {
                        ok = true;
                        break;
                    }
                }
                // reject hops onto the other branch
                if (!ok || std::abs(v - c0 * u * u) > std::max(0.45 * gap * u * u, 1e-14)) {
                    havePrev = false;
                    continue;
                }
                pts.emplace_back(u, Point2{u, v});
                prevV = v;
                havePrev = true;
            }
        }
        if (static_cast<int>(pts.size()) < K) return std::nullopt;
        std::sort(pts.begin(), pts.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        PlanarCurve chartCurve;
        for (auto& [u, p] : pts) chartCurve.samples.push_back(p);
        FitResult fit = canonical_fit(chartCurve, h);
        for (auto& [u, p] : pts) curve.samples.push_back(ctx.chart.toAmbient(p));
        return fit.value;
    };

    out.cMinus = traceBranch(cMinus, out.branchMinus);
    out.cPlus = traceBranch(cPlus, out.branchPlus);
    return out;
}

}  // namespace

LocalBranches tangent_section_local(const PolySurface& s, const GodronContext& ctx,
                                    double rho) {
    Poly2 F = ctx.chart.pushSurface(s);
    if (rho > 1) return traceChartBranches(F, ctx, 0, 0, true);
    double root = std::sqrt(std::max(1 - rho, 0.0));
    return traceChartBranches(F, ctx, ctx.alphaHat * (1 - root), ctx.alphaHat * (1 + root),
                              false);
}

LocalBranches g_contour_local(const PolySurface& s, const GodronContext& ctx, double rho) {
    // chi(x, y) = f - f(g) - (x - gx) f_x - (y - gy) f_y in the chart
    Point2 g = ctx.seed.location;
    Poly2 X = Poly2::variableX(), Y = Poly2::variableY();
    Poly2 chi = s.poly() - Poly2::constant(s.eval(g)) -
                (X - Poly2::constant(g.x)) * s.deriv(1, 0) -
                (Y - Poly2::constant(g.y)) * s.deriv(0, 1);
    Poly2 chiChart = chi.composeAffine(ctx.chart.linearMap[0], ctx.chart.linearMap[2],
                                       ctx.chart.origin3.x, ctx.chart.linearMap[1],
                                       ctx.chart.linearMap[3], ctx.chart.origin3.y);
    if (rho > 4.0 / 3) return traceChartBranches(chiChart, ctx, 0, 0, true);
    double root = std::sqrt(std::max(4 - 3 * rho, 0.0));
    return traceChartBranches(chiChart, ctx, ctx.alphaHat * (2 - root),
                              ctx.alphaHat * (2 + root), false);
}

// ---------------------------------------------------------------------------
// Flattening residuals and the slope-difference oracle.

Point3 flattening_residuals(const PolySurface& s, const GodronContext& ctx,
                            TangentCurveKind kind, double delta) {
    if (delta <= 0) delta = ctx.fitHalfWidth / 4;
    Poly2 h = hessianPoly(s);
    Poly2 hx = h.dx(), hy = h.dy();
    double tolAbs = 1e-15 * std::max(h.maxAbsCoeff(), 1.0);
    double cP = ctx.alphaHat * (3 * ctx.rhoJet - 2);
    double cF = ctx.alphaHat * ctx.rhoJet * (2 * ctx.rhoJet - 1);
    double cD = ctx.alphaHat * ctx.rhoJet;
    double slopeRate = 2 * ctx.rhoJet * ctx.alphaHat;

    auto pointAt = [&](double u) -> Point2 {
        switch (kind) {
            case TangentCurveKind::Parabolic: {
                Point2 p = ctx.chart.toAmbient({u, cP * u * u});
                if (!solveParabolicAtU(ctx, h, hx, hy, u, p, tolAbs))
                    throw AnalysisError("BranchTraceFailure", "parabolic stencil point");
                return p;
            }
            case TangentCurveKind::Flecnodal: {
                Point2 amb = ctx.chart.toAmbient({u, cF * u * u});
                Point2 dirChart{1.0, slopeRate * u};
                Point2 dirAmb{
                    ctx.chart.linearMap[0] * dirChart.x + ctx.chart.linearMap[2] * dirChart.y,
                    ctx.chart.linearMap[1] * dirChart.x + ctx.chart.linearMap[3] * dirChart.y};
                SlopeDir sd = SlopeDir::fromDirection(dirAmb);
                double x = amb.x, y = amb.y, sl = sd.slope;
                SlopeChart ch = sd.chart;
                if (!solveFlecnodalAtU(s, ctx, u, x, y, sl, ch))
                    throw AnalysisError("BranchTraceFailure", "flecnodal stencil point");
                return {x, y};
            }
            default: {
                Point2 a = ctx.chart.toAmbient({u, cD * u * u});
                Point2 b = ctx.chart.toAmbient({-u, cD * u * u});
                if (!solveConodalAtU(s, ctx, u, a, b))
                    throw AnalysisError("BranchTraceFailure", "conodal stencil point");
                return a;
            }
        }
    };

    double Hm2 = ctx.chart.heightOverPlane(s.point3(pointAt(-2 * delta)));
    double Hm1 = ctx.chart.heightOverPlane(s.point3(pointAt(-delta)));
    double Hp1 = ctx.chart.heightOverPlane(s.point3(pointAt(delta)));
    double Hp2 = ctx.chart.heightOverPlane(s.point3(pointAt(2 * delta)));

    double d1 = (8 * (Hp1 - Hm1) - (Hp2 - Hm2)) / (12 * delta);
    double d2 = (-Hp2 + 16 * Hp1 + 16 * Hm1 - Hm2) / (12 * delta * delta);
    double d3 = (Hp2 - 2 * Hp1 + 2 * Hm1 - Hm2) / (2 * delta * delta * delta);
    double scale = ctx.jet.scale();
    return {std::abs(d1) / scale, std::abs(d2) / scale, std::abs(d3) / scale};
}

double slope_difference_derivative(const PolySurface& s, const GodronContext& ctx) {
    Poly2 h = hessianPoly(s);
    Poly2 hx = h.dx(), hy = h.dy();
    double tolAbs = 1e-14 * std::max(h.maxAbsCoeff(), 1.0);
    double cP = ctx.alphaHat * (3 * ctx.rhoJet - 2);
    double delta = ctx.fitHalfWidth / 4;

    auto chartSlopeDiff = [&](double u) -> double {
        Point2 p = ctx.chart.toAmbient({u, cP * u * u});
        if (!solveParabolicAtU(ctx, h, hx, hy, u, p, tolAbs))
            throw AnalysisError("BranchTraceFailure", "parabolic point for the slope oracle");
        Quartic q = quarticAt(s, p);
        Point2 dAmb = doubleRootDir(q);
        double d = ctx.chart.det();
        Point2 dChart{(ctx.chart.linearMap[3] * dAmb.x - ctx.chart.linearMap[2] * dAmb.y) / d,
                      (-ctx.chart.linearMap[1] * dAmb.x + ctx.chart.linearMap[0] * dAmb.y) / d};
        double pc = dChart.y / dChart.x;
        Point2 grad{hx.eval(p), hy.eval(p)};
        double m = -dot(grad, ctx.chart.colU()) / dot(grad, ctx.chart.colV());
        return pc - m;
    };
    return (chartSlopeDiff(delta) - chartSlopeDiff(-delta)) / (2 * delta);
}

// ---------------------------------------------------------------------------
// Record assembly.

GodronRecord build_godron_record(const PolySurface& s, const GodronSeed& seed,
                                 Window window, const GodronOptions& opts) {
    double fitH = opts.fitHalfWidth > 0 ? opts.fitHalfWidth : 0.05 * window.diagonal();
    GodronContext ctx = prepare_godron(s, seed, fitH);

    GodronRecord rec;
    rec.location = seed.location;
    rec.slope = seed.slope;
    rec.chart = ctx.chart;

    RhoResult rr = cr_invariant(s, ctx);
    rec.rho = rr.rho;
    rec.rhoDiagnostics = rr.diagnostics;
    rec.coeffs = rr.coeffs;
    if (rr.diagnostics.warned) rec.flags.push_back("RouteDeviation");
    if (rr.diagnostics.inconsistent) rec.flags.push_back("InconsistentRoutes");

    rec.index = godron_index(s, seed);
    if (!rec.index.consistent) rec.flags.push_back("IndeterminateIndex");

    rec.nearFlecGodron = std::abs(rec.rho) < 1e-4;
    rec.nearBigodron = std::abs(rec.rho - 1) < 1e-4;
    if (rec.nearFlecGodron) rec.flags.push_back("NearFlecGodron");
    if (rec.nearBigodron) rec.flags.push_back("NearBigodron");

    if (!rec.nearFlecGodron && !rec.nearBigodron) {
        rec.labels = classify_godron(rec.rho);
        if (rec.index.index != (rec.rho > 1 ? 1 : -1))
            rec.flags.push_back("IndexRhoMismatch");
    }

    rec.parabolicLocal = local_parabolic(s, ctx);
    rec.flecnodalLocal = local_flecnodal(s, ctx);
    std::string conodalFailure;
    rec.conodalLocal = trace_conodal_local(s, ctx, &conodalFailure);
    if (!conodalFailure.empty()) rec.flags.push_back(conodalFailure);

    if (opts.sections && !rec.nearBigodron) {
        LocalBranches tb = tangent_section_local(s, ctx, rec.rho);
        if (tb.trivial) {
            rec.flags.push_back("SectionTrivial");
        } else {
            if (tb.cMinus) rec.coeffs.cTminus = tb.cMinus;
            if (tb.cPlus) rec.coeffs.cTplus = tb.cPlus;
            rec.sectionMinus = tb.branchMinus;
            rec.sectionPlus = tb.branchPlus;
            if (!tb.cMinus || !tb.cPlus) rec.flags.push_back("SectionBranchTraceFailure");
        }
    }
    if (opts.contours && !rec.nearBigodron) {
        LocalBranches cb = g_contour_local(s, ctx, rec.rho);
        if (cb.trivial) {
            rec.flags.push_back("ContourTrivial");
        } else {
            if (cb.cMinus) rec.coeffs.cCminus = cb.cMinus;
            if (cb.cPlus) rec.coeffs.cCplus = cb.cPlus;
            rec.contourMinus = cb.branchMinus;
            rec.contourPlus = cb.branchPlus;
            if (!cb.cMinus || !cb.cPlus) rec.flags.push_back("ContourBranchTraceFailure");
        }
    }
    return rec;
}

}  // namespace godron
