#include "godron/flecnodal.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "godron/kernels.hpp"

namespace godron {

double inflection_eval(const Jet& j, double slope, SlopeChart chart) {
    double fxxx = j.p(3, 0), fxxy = j.p(2, 1), fxyy = j.p(1, 2), fyyy = j.p(0, 3);
    double t = slope;
    if (chart == SlopeChart::P)
        return fxxx + 3 * fxxy * t + 3 * fxyy * t * t + fyyy * t * t * t;
    return fyyy + 3 * fxyy * t + 3 * fxxy * t * t + fxxx * t * t * t;
}

double quarticContactResidual(const PolySurface& s, Point2 pt, Point2 direction) {
    double n = norm(direction);
    if (n == 0) return 0.0;
    Point2 d = (1.0 / n) * direction;
    auto coef = s.poly().restrictLine(pt, d);
    return coef.size() > 4 ? coef[4] : 0.0;
}

int contact_order(const PolySurface& s, Point2 pt, Point2 direction, int maxOrder) {
    double n = norm(direction);
    Point2 d = n > 0 ? (1.0 / n) * direction : Point2{1, 0};
    auto coef = s.poly().restrictLine(pt, d);
    // height over the tangent line: constant and linear parts cancel
    double scale = 0.0;
    for (std::size_t k = 2; k < coef.size(); ++k) scale = std::max(scale, std::abs(coef[k]));
    if (scale == 0.0) return maxOrder + 1;
    for (int k = 2; k <= maxOrder; ++k) {
        double c = k < static_cast<int>(coef.size()) ? coef[std::size_t(k)] : 0.0;
        if (std::abs(c) > 1e-9 * scale) return k;
    }
    return maxOrder + 1;
}

BranchLabel left_right_label(const SpaceCurve& c, std::size_t index, double tolRel) {
    Point3 d1, d2, d3;
    curveDerivatives(c, index, 3, d1, d2, d3);
    double det = det3(d1, d2, d3);
    double scale = norm(d1) * norm(d2) * norm(d3);
    if (scale == 0 || std::abs(det) < tolRel * scale) return BranchLabel::Flattening;
    return det > 0 ? BranchLabel::Right : BranchLabel::Left;
}

BranchLabel asymptoticFrameSign(const PolySurface& s, const LiftedPoint& lp, double tolRel) {
    Point2 pt = lp.xy();
    double fxx = s.deriv(2, 0, pt), fxy = s.deriv(1, 1, pt), fyy = s.deriv(0, 2, pt);
    double scale = std::max({std::abs(fxx), std::abs(fxy), std::abs(fyy), 1e-300});
    double signedAp;
    if (lp.chart == SlopeChart::P) {
        signedAp = 2 * (fxy + fyy * lp.slope);
    } else {
        // the x<->y swap reverses the ambient orientation
        signedAp = -2 * (fxy + fxx * lp.slope);
    }
    if (std::abs(signedAp) < tolRel * scale) return BranchLabel::Flattening;
    return signedAp > 0 ? BranchLabel::Right : BranchLabel::Left;
}

// ---------------------------------------------------------------------------
// Continuation on {A = 0, I = 0}.

namespace {

struct LiftedSystem {
    const PolySurface& s;

    // F = (A, I) and the two gradient rows at (x, y, slope)
    void eval(double x, double y, double sl, SlopeChart ch, double F[2],
              Point3 grad[2]) const {
        Point2 pt{x, y};
        double fxx = s.deriv(2, 0, pt), fxy = s.deriv(1, 1, pt), fyy = s.deriv(0, 2, pt);
        double fxxx = s.deriv(3, 0, pt), fxxy = s.deriv(2, 1, pt), fxyy = s.deriv(1, 2, pt),
               fyyy = s.deriv(0, 3, pt);
        double f40 = s.deriv(4, 0, pt), f31 = s.deriv(3, 1, pt), f22 = s.deriv(2, 2, pt),
               f13 = s.deriv(1, 3, pt), f04 = s.deriv(0, 4, pt);
        double t = sl;
        if (ch == SlopeChart::P) {
            F[0] = fxx + 2 * fxy * t + fyy * t * t;
            F[1] = fxxx + 3 * fxxy * t + 3 * fxyy * t * t + fyyy * t * t * t;
            grad[0] = {fxxx + 2 * fxxy * t + fxyy * t * t,
                       fxxy + 2 * fxyy * t + fyyy * t * t, 2 * fxy + 2 * fyy * t};
            grad[1] = {f40 + 3 * f31 * t + 3 * f22 * t * t + f13 * t * t * t,
                       f31 + 3 * f22 * t + 3 * f13 * t * t + f04 * t * t * t,
                       3 * fxxy + 6 * fxyy * t + 3 * fyyy * t * t};
        } else {
            F[0] = fyy + 2 * fxy * t + fxx * t * t;
            F[1] = fyyy + 3 * fxyy * t + 3 * fxxy * t * t + fxxx * t * t * t;
            grad[0] = {fxyy + 2 * fxxy * t + fxxx * t * t,
                       fyyy + 2 * fxyy * t + fxxy * t * t, 2 * fxy + 2 * fxx * t};
            grad[1] = {f13 + 3 * f22 * t + 3 * f31 * t * t + f40 * t * t * t,
                       f04 + 3 * f13 * t + 3 * f22 * t * t + f31 * t * t * t,
                       3 * fxyy + 6 * fxxy * t + 3 * fxxx * t * t};
        }
    }

    // Gauss-Newton least-norm correction onto {A = 0, I = 0}
    bool project(double& x, double& y, double& sl, SlopeChart ch, int iters = 6,
                 double tol = 1e-12) const {
        for (int it = 0; it < iters; ++it) {
            double F[2];
            Point3 g[2];
            eval(x, y, sl, ch, F, g);
            double scale =
                std::max({norm(g[0]), norm(g[1]), 1e-300});
            if (std::abs(F[0]) + std::abs(F[1]) < tol * scale) return true;
            // solve J J^T lam = F, delta = -J^T lam
            double a = dot(g[0], g[0]), b = dot(g[0], g[1]), c = dot(g[1], g[1]);
            double det = a * c - b * b;
            if (std::abs(det) < 1e-300) return false;
            double l0 = (c * F[0] - b * F[1]) / det;
            double l1 = (-b * F[0] + a * F[1]) / det;
            x -= l0 * g[0].x + l1 * g[1].x;
            y -= l0 * g[0].y + l1 * g[1].y;
            sl -= l0 * g[0].z + l1 * g[1].z;
        }
        double F[2];
        Point3 g[2];
        eval(x, y, sl, ch, F, g);
        double scale = std::max({norm(g[0]), norm(g[1]), 1e-300});
        return std::abs(F[0]) + std::abs(F[1]) < 1e-8 * scale;
    }

    Point3 tangent(double x, double y, double sl, SlopeChart ch) const {
        double F[2];
        Point3 g[2];
        eval(x, y, sl, ch, F, g);
        return cross(g[0], g[1]);
    }
};

double dirAngle(const LiftedPoint& lp) {
    Point2 d = lp.dir().direction();
    double a = std::atan2(d.y, d.x);
    if (a < 0) a += M_PI;
    if (a >= M_PI) a -= M_PI;
    return a;
}

double angleDistMod(double a, double b) {
    double d = std::abs(a - b);
    return std::min(d, M_PI - d);
}

struct Tracer {
    const PolySurface& s;
    Window win;
    double step;
    LiftedSystem sys;
    std::vector<FlecnodalTrace>& out;
    // dedup hash over (x, y) cells; each entry keeps the direction angle
    std::unordered_map<long long, std::vector<std::pair<Point2, double>>> hash;

    long long cellKey(double x, double y) const {
        double cell = 4 * step;
        long long ix = static_cast<long long>(std::floor(x / cell));
        long long iy = static_cast<long long>(std::floor(y / cell));
        return (ix << 28) ^ (iy & ((1ll << 28) - 1));
    }

    void rememberTrace(const FlecnodalTrace& tr) {
        for (const auto& q : tr.lifted)
            hash[cellKey(q.x, q.y)].emplace_back(q.xy(), dirAngle(q));
    }

    bool nearExisting(const LiftedPoint& lp, double radius) const {
        double a = dirAngle(lp);
        double cell = 4 * step;
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj) {
                auto it = hash.find(cellKey(lp.x + di * cell, lp.y + dj * cell));
                if (it == hash.end()) continue;
                for (const auto& [q, qa] : it->second) {
                    double dx = q.x - lp.x, dy = q.y - lp.y;
                    if (dx * dx + dy * dy < radius * radius && angleDistMod(a, qa) < 0.15)
                        return true;
                }
            }
        return false;
    }

    // one direction of continuation; appends to pts
    void march(std::vector<LiftedPoint>& pts, LiftedPoint start, Point3 t0,
               bool& closedFlag) {
        double x = start.x, y = start.y, sl = start.slope;
        SlopeChart ch = start.chart;
        Point3 prevT = t0;
        double h = step;
        int sinceStart = 0;
        while (static_cast<int>(pts.size()) < 60000) {
            Point3 T = sys.tangent(x, y, sl, ch);
            double tn = norm(T);
            if (tn < 1e-300) break;
            T = (1.0 / tn) * T;
            if (dot(T, prevT) < 0) T = -1.0 * T;
            if (dot(T, prevT) < 0.98 && h > step / 64) {
                h /= 2;
            } else if (h < step) {
                h = std::min(step, h * 2);
            }
            double nx = x + h * T.x, ny = y + h * T.y, ns = sl + h * T.z;
            if (!sys.project(nx, ny, ns, ch)) break;
            double moved = std::hypot(nx - x, ny - y) + std::abs(ns - sl);
            if (moved > 6 * h) {  // corrector ran away; retry shorter
                if (h > step / 64) {
                    h /= 2;
                    continue;
                }
                break;
            }
            x = nx;
            y = ny;
            sl = ns;
            prevT = T;
            if (std::abs(sl) > 1.5) {
                double p = sl;
                sl = 1.0 / p;
                ch = (ch == SlopeChart::P) ? SlopeChart::Q : SlopeChart::P;
                prevT = {prevT.x, prevT.y, -prevT.z / (p * p)};
            }
            pts.push_back({x, y, sl, ch});
            ++sinceStart;
            if (!win.contains({x, y})) break;
            if (sinceStart > 20) {
                double dx = x - start.x, dy = y - start.y;
                if (dx * dx + dy * dy < (1.5 * step) * (1.5 * step) &&
                    angleDistMod(dirAngle(pts.back()), dirAngle(start)) < 0.2) {
                    closedFlag = true;
                    break;
                }
            }
        }
    }

    void traceFrom(LiftedPoint seed) {
        if (!sys.project(seed.x, seed.y, seed.slope, seed.chart)) return;
        if (std::abs(seed.slope) > 1.5) {
            double p = seed.slope;
            seed.slope = 1.0 / p;
            seed.chart = seed.chart == SlopeChart::P ? SlopeChart::Q : SlopeChart::P;
        }
        if (!win.contains(seed.xy())) return;
        if (nearExisting(seed, 2 * step)) return;

        Point3 T = sys.tangent(seed.x, seed.y, seed.slope, seed.chart);
        if (norm(T) < 1e-300) return;
        T = (1.0 / norm(T)) * T;

        bool closedF = false, closedB = false;
        std::vector<LiftedPoint> fwd, bwd;
        march(fwd, seed, T, closedF);
        if (!closedF) march(bwd, seed, -1.0 * T, closedB);

        FlecnodalTrace tr;
        tr.closed = closedF || closedB;
        for (auto it = bwd.rbegin(); it != bwd.rend(); ++it) tr.lifted.push_back(*it);
        tr.lifted.push_back(seed);
        for (const auto& p : fwd) tr.lifted.push_back(p);
        if (tr.lifted.size() < 3) return;
        if (tr.closed && norm(tr.lifted.front().xy() - tr.lifted.back().xy()) > 1e-12)
            tr.lifted.push_back(tr.lifted.front());

        // canonical orientation for deterministic output
        const auto& a = tr.lifted.front();
        const auto& b = tr.lifted.back();
        if (std::make_pair(b.x, b.y) < std::make_pair(a.x, a.y))
            std::reverse(tr.lifted.begin(), tr.lifted.end());

        tr.projected.samples.reserve(tr.lifted.size());
        for (const auto& lp : tr.lifted) {
            if (!tr.projected.samples.empty() &&
                norm(lp.xy() - tr.projected.samples.back()) < 1e-14)
                continue;
            tr.projected.samples.push_back(lp.xy());
        }
        tr.projected.closed = tr.closed;
        tr.projected.tag = "flecnodal";
        rememberTrace(tr);
        out.push_back(std::move(tr));
    }
};

}  // namespace

std::vector<FlecnodalTrace> trace_flecnodal(const PolySurface& s, Window window,
                                            int resolution) {
    if (window.degenerate()) throw AnalysisError("BadWindow", "window is empty");
    int res = std::clamp(resolution / 2, 48, 384);  // seed grid
    std::vector<std::vector<double>> g(7);
    const int D[7][2] = {{2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}};
    for (int k = 0; k < 7; ++k)
        kernels::fillGrid(s.deriv(D[k][0], D[k][1]), window.x0, window.x1, window.y0,
                          window.y1, res, res, g[k]);

    struct NodeBranch {
        Point2 d;   // canonically oriented unit direction
        double C = 0;  // cubic form along d
        bool ok = false;
    };
    auto canonical = [](Point2 d) {
        double n = norm(d);
        if (n == 0) return Point2{0, 0};
        d = (1.0 / n) * d;
        if (d.x < 0 || (d.x == 0 && d.y < 0)) d = -1.0 * d;
        return d;
    };
    std::vector<std::array<NodeBranch, 2>> nodes(std::size_t(res) * res);
    for (int j = 0; j < res; ++j)
        for (int i = 0; i < res; ++i) {
            std::size_t id = std::size_t(j) * res + i;
            double fxx = g[0][id], fxy = g[1][id], fyy = g[2][id];
            double disc = fxy * fxy - fxx * fyy;
            if (disc <= 0) continue;
            double sq = std::sqrt(disc);
            Point2 d1 = norm(Point2{fyy, sq - fxy}) >= norm(Point2{-fxy - sq, fxx})
                            ? Point2{fyy, sq - fxy}
                            : Point2{-fxy - sq, fxx};
            Point2 d2 = norm(Point2{fyy, -sq - fxy}) >= norm(Point2{sq - fxy, fxx})
                            ? Point2{fyy, -sq - fxy}
                            : Point2{sq - fxy, fxx};
            for (int b = 0; b < 2; ++b) {
                Point2 d = canonical(b == 0 ? d1 : d2);
                if (norm(d) == 0) continue;
                NodeBranch& br = nodes[id][std::size_t(b)];
                br.d = d;
                br.C = g[3][id] * d.x * d.x * d.x + 3 * g[4][id] * d.x * d.x * d.y +
                       3 * g[5][id] * d.x * d.y * d.y + g[6][id] * d.y * d.y * d.y;
                br.ok = true;
            }
        }

    double dx = window.width() / (res - 1), dy = window.height() / (res - 1);
    std::vector<FlecnodalTrace> out;
    Tracer tracer{s, window, window.diagonal() / 512, {s}, out};

    auto cubicAlong = [&](Point2 pt, Point2 d) {
        return s.deriv(3, 0, pt) * d.x * d.x * d.x +
               3 * s.deriv(2, 1, pt) * d.x * d.x * d.y +
               3 * s.deriv(1, 2, pt) * d.x * d.y * d.y + s.deriv(0, 3, pt) * d.y * d.y * d.y;
    };
    // direction of the asymptotic branch at pt closest to ref (or zero)
    auto branchDirAt = [&](Point2 pt, Point2 ref) -> Point2 {
        double fxx = s.deriv(2, 0, pt), fxy = s.deriv(1, 1, pt), fyy = s.deriv(0, 2, pt);
        double disc = fxy * fxy - fxx * fyy;
        if (disc <= 0) return {0, 0};
        double sq = std::sqrt(disc);
        Point2 c0 = canonical(norm(Point2{fyy, sq - fxy}) >= norm(Point2{-fxy - sq, fxx})
                                  ? Point2{fyy, sq - fxy}
                                  : Point2{-fxy - sq, fxx});
        Point2 c1 = canonical(norm(Point2{fyy, -sq - fxy}) >= norm(Point2{sq - fxy, fxx})
                                  ? Point2{fyy, -sq - fxy}
                                  : Point2{sq - fxy, fxx});
        double a0 = angleDistMod(std::atan2(c0.y, c0.x), std::atan2(ref.y, ref.x));
        double a1 = angleDistMod(std::atan2(c1.y, c1.x), std::atan2(ref.y, ref.x));
        return a0 <= a1 ? c0 : c1;
    };

    auto scanEdge = [&](int i0, int j0, int i1, int j1) {
        const auto& na = nodes[std::size_t(j0) * res + i0];
        const auto& nb = nodes[std::size_t(j1) * res + i1];
        Point2 A{window.x0 + i0 * dx, window.y0 + j0 * dy};
        Point2 B{window.x0 + i1 * dx, window.y0 + j1 * dy};
        bool pairedBefore[2] = {false, false};
        for (int ba = 0; ba < 2; ++ba) {
            if (!na[std::size_t(ba)].ok) continue;
            int best = -1;
            double bestAng = 0.45;
            for (int bb = 0; bb < 2; ++bb) {
                if (!nb[std::size_t(bb)].ok || pairedBefore[bb]) continue;
                double ang =
                    angleDistMod(std::atan2(na[std::size_t(ba)].d.y, na[std::size_t(ba)].d.x),
                                 std::atan2(nb[std::size_t(bb)].d.y, nb[std::size_t(bb)].d.x));
                if (ang < bestAng) {
                    bestAng = ang;
                    best = bb;
                }
            }
            if (best < 0) continue;
            pairedBefore[best] = true;
            double Ca = na[std::size_t(ba)].C;
            double Cb = dot(na[std::size_t(ba)].d, nb[std::size_t(best)].d) >= 0
                            ? nb[std::size_t(best)].C
                            : -nb[std::size_t(best)].C;
            if ((Ca == 0.0 && Cb == 0.0) || Ca * Cb > 0) continue;
            // bisect along the edge, tracking the branch direction
            Point2 lo = A, hi = B, ref = na[std::size_t(ba)].d;
            double Clo = Ca;
            for (int it = 0; it < 40; ++it) {
                Point2 mid = lo + 0.5 * (hi - lo);
                Point2 d = branchDirAt(mid, ref);
                if (norm(d) == 0) break;
                double sgn = dot(d, ref) >= 0 ? 1.0 : -1.0;
                double Cm = sgn * cubicAlong(mid, d);
                if (Clo * Cm <= 0)
                    hi = mid;
                else {
                    lo = mid;
                    Clo = Cm;
                }
                ref = sgn > 0 ? d : -1.0 * d;
            }
            Point2 seedPt = lo + 0.5 * (hi - lo);
            Point2 d = branchDirAt(seedPt, ref);
            if (norm(d) == 0) continue;
            SlopeDir sd = SlopeDir::fromDirection(d);
            tracer.traceFrom({seedPt.x, seedPt.y, sd.slope, sd.chart});
        }
    };

    for (int j = 0; j < res; ++j)
        for (int i = 0; i < res; ++i) {
            if (i + 1 < res) scanEdge(i, j, i + 1, j);
            if (j + 1 < res) scanEdge(i, j, i, j + 1);
        }

    std::sort(out.begin(), out.end(), [](const FlecnodalTrace& a, const FlecnodalTrace& b) {
        const Point2 pa = a.projected.samples[0], pb = b.projected.samples[0];
        if (pa.x != pb.x) return pa.x < pb.x;
        return pa.y < pb.y;
    });
    return out;
}

FlecnodalTrace label_branches(FlecnodalTrace t, const PolySurface& s) {
    t.labels.resize(t.lifted.size());
    for (std::size_t k = 0; k < t.lifted.size(); ++k)
        t.labels[k] = asymptoticFrameSign(s, t.lifted[k]);
    return t;
}

// ---------------------------------------------------------------------------

HyperbonodeSearch find_hyperbonodes(const std::vector<FlecnodalTrace>& traces,
                                    double dedupRadius) {
    HyperbonodeSearch res;
    struct Seg {
        Point2 a, b;
        std::size_t trace, index;
        BranchLabel label;
        bool usable;
    };
    std::vector<Seg> segs;
    double medLen = 0;
    std::size_t nseg = 0;
    for (std::size_t ti = 0; ti < traces.size(); ++ti) {
        const auto& t = traces[ti];
        if (t.labels.size() != t.lifted.size()) continue;  // unlabeled: skip
        std::size_t nPts = t.projected.samples.size();
        for (std::size_t k = 0; k + 1 < nPts; ++k) {
            Seg sg;
            sg.a = t.projected.samples[k];
            sg.b = t.projected.samples[k + 1];
            sg.trace = ti;
            sg.index = k;
            BranchLabel la = t.labels[std::min(k, t.labels.size() - 1)];
            BranchLabel lb = t.labels[std::min(k + 1, t.labels.size() - 1)];
            if (la == BranchLabel::Flattening) la = lb;
            sg.usable = la != BranchLabel::Flattening && (la == lb || lb == BranchLabel::Flattening);
            sg.label = la;
            segs.push_back(sg);
            medLen += norm(sg.b - sg.a);
            ++nseg;
        }
    }
    if (nseg == 0) return res;
    medLen /= double(nseg);
    if (dedupRadius <= 0) dedupRadius = 3 * medLen;

    struct Cand {
        Point2 p;
        double angle;
        Seg sa, sb;
    };
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        for (std::size_t j = i + 1; j < segs.size(); ++j) {
            const Seg& u = segs[i];
            const Seg& v = segs[j];
            if (!u.usable || !v.usable) continue;
            if (u.trace == v.trace) {
                std::size_t gap = v.index > u.index ? v.index - u.index : u.index - v.index;
                std::size_t n = traces[u.trace].projected.samples.size();
                if (gap <= 2 || (traces[u.trace].closed && gap + 3 >= n)) continue;
            }
            if (std::max(u.a.x, u.b.x) < std::min(v.a.x, v.b.x) ||
                std::max(v.a.x, v.b.x) < std::min(u.a.x, u.b.x) ||
                std::max(u.a.y, u.b.y) < std::min(v.a.y, v.b.y) ||
                std::max(v.a.y, v.b.y) < std::min(u.a.y, u.b.y))
                continue;
            Point2 r = u.b - u.a, q = v.b - v.a;
            double denom = cross(r, q);
            if (denom == 0) continue;
            Point2 w = v.a - u.a;
            double t1 = cross(w, q) / denom;
            double t2 = cross(w, r) / denom;
            if (t1 <= 0 || t1 >= 1 || t2 <= 0 || t2 >= 1) continue;
            double ang = std::atan2(std::abs(denom), dot(r, q));
            if (ang > M_PI / 2) ang = M_PI - ang;
            if (ang < 0.02) continue;  // tangency, not a transverse crossing
            cands.push_back({u.a + t1 * r, ang, u, v});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.p.x != b.p.x) return a.p.x < b.p.x;
        return a.p.y < b.p.y;
    });
    std::vector<Point2> accepted;
    for (const auto& c : cands) {
        bool dup = false;
        for (const auto& p : accepted)
            if (norm(p - c.p) < dedupRadius) dup = true;
        if (dup) continue;
        accepted.push_back(c.p);
        Hyperbonode h;
        h.location = c.p;
        h.angle = c.angle;
        h.traceA = c.sa.trace;
        h.traceB = c.sb.trace;
        h.labelA = c.sa.label;
        h.labelB = c.sb.label;
        if (c.sa.label != c.sb.label)
            res.hyperbonodes.push_back(h);
        else
            res.anomalies.push_back(h);
    }
    return res;
}

// ---------------------------------------------------------------------------

std::vector<Biflecnode> find_biflecnodes(FlecnodalTrace& t, const PolySurface& s) {
    std::vector<Biflecnode> out;
    std::size_t n = t.lifted.size();
    if (n < 3) return out;
    std::vector<double> r(n);
    double scale = 0;
    for (std::size_t k = 0; k < n; ++k) {
        r[k] = quarticContactResidual(s, t.lifted[k].xy(), t.lifted[k].dir().direction());
        scale = std::max(scale, std::abs(r[k]));
    }
    if (scale == 0.0) {
        t.ruled = true;
        return out;
    }
    // ruled component: a run of residual zeros
    int run = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(r[k]) < 1e-9 * scale) {
            if (++run >= 3) {
                t.ruled = true;
                return out;
            }
        } else {
            run = 0;
        }
    }

    LiftedSystem sys{s};
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (r[k] == 0.0 || r[k] * r[k + 1] > 0) continue;
        LiftedPoint a = t.lifted[k], b = t.lifted[k + 1];
        if (a.chart != b.chart) continue;  // residual sign handled next segment
        double ra = r[k];
        LiftedPoint mid = a;
        for (int it = 0; it < 50; ++it) {
            mid.x = 0.5 * (a.x + b.x);
            mid.y = 0.5 * (a.y + b.y);
            mid.slope = 0.5 * (a.slope + b.slope);
            mid.chart = a.chart;
            if (!sys.project(mid.x, mid.y, mid.slope, mid.chart)) break;
            double rm = quarticContactResidual(s, mid.xy(), mid.dir().direction());
            if (ra * rm <= 0)
                b = mid;
            else {
                a = mid;
                ra = rm;
            }
        }
        Biflecnode bf;
        bf.location = mid.xy();
        bf.slope = mid.dir();
        bf.side = t.labels.size() == t.lifted.size() ? t.labels[k] : BranchLabel::Flattening;
        if (bf.side == BranchLabel::Flattening && t.labels.size() == t.lifted.size())
            bf.side = t.labels[k + 1];
        bf.trace = 0;
        out.push_back(bf);
    }
    return out;
}

}  // namespace godron
