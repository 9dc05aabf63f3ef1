#include "godron/surface.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace godron {

int Jet::indexOf(int i, int j, int order) { return i * (order + 1) + j; }

double Jet::p(int i, int j) const {
    if (i < 0 || j < 0 || i + j > order) return 0.0;
    return partials[std::size_t(indexOf(i, j, order))];
}

double& Jet::p(int i, int j) { return partials[std::size_t(indexOf(i, j, order))]; }

double Jet::scale() const {
    double m = 0.0;
    for (int i = 0; i <= order; ++i)
        for (int j = 0; i + j <= order; ++j) m = std::max(m, std::abs(p(i, j)));
    return m > 0 ? m : 1.0;
}

PolySurface::PolySurface(Poly2 p) : poly_(std::move(p)) {
    poly_.trim();
    degree_ = std::max(poly_.totalDegree(), 0);
    cache_.resize(std::size_t(kCachedOrder + 1) * (kCachedOrder + 1));
    for (int i = 0; i <= kCachedOrder; ++i)
        for (int j = 0; i + j <= kCachedOrder; ++j)
            cache_[std::size_t(i) * (kCachedOrder + 1) + j] = poly_.derivative(i, j);
}

const Poly2& PolySurface::deriv(int i, int j) const {
    if (i + j <= kCachedOrder)
        return cache_[std::size_t(i) * (kCachedOrder + 1) + j];
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    if (!extra_) extra_ = std::make_shared<std::map<std::pair<int, int>, Poly2>>();
    auto it = extra_->find({i, j});
    if (it == extra_->end())
        it = extra_->emplace(std::pair{i, j}, poly_.derivative(i, j)).first;
    return it->second;
}

Point2 SlopeDir::direction() const {
    if (chart == SlopeChart::P) {
        double n = std::sqrt(1.0 + slope * slope);
        return {1.0 / n, slope / n};
    }
    double n = std::sqrt(1.0 + slope * slope);
    return {slope / n, 1.0 / n};
}

SlopeDir SlopeDir::fromDirection(Point2 d) {
    if (std::abs(d.y) <= std::abs(d.x)) return {SlopeChart::P, d.y / d.x};
    return {SlopeChart::Q, d.x / d.y};
}

Point2 AffineChart::toAmbient(Point2 uv) const {
    return {origin3.x + linearMap[0] * uv.x + linearMap[2] * uv.y,
            origin3.y + linearMap[1] * uv.x + linearMap[3] * uv.y};
}

Point2 AffineChart::toChart(Point2 xy) const {
    double dx = xy.x - origin3.x, dy = xy.y - origin3.y;
    double d = det();
    return {(linearMap[3] * dx - linearMap[2] * dy) / d,
            (-linearMap[1] * dx + linearMap[0] * dy) / d};
}

double AffineChart::heightOverPlane(Point3 p) const {
    return orientationSign * (p.z - (alpha * p.x + beta * p.y + gamma));
}

Poly2 AffineChart::pushSurface(const PolySurface& s) const {
    // w(u,v) = sigma * (f(p0 + M(u,v)) - plane(p0 + M(u,v)))
    Poly2 comp = s.poly().composeAffine(linearMap[0], linearMap[2], origin3.x,
                                        linearMap[1], linearMap[3], origin3.y);
    Poly2 plane = Poly2::fromTerms({{{1, 0}, alpha * linearMap[0] + beta * linearMap[1]},
                                    {{0, 1}, alpha * linearMap[2] + beta * linearMap[3]},
                                    {{0, 0}, alpha * origin3.x + beta * origin3.y + gamma}});
    Poly2 F = (comp - plane) * double(orientationSign);
    F.trim();
    return F;
}

PolySurface parse_surface(const std::string& text,
                          const std::map<std::string, double>& params) {
    return PolySurface(parseExpression(text, params));
}

Jet eval_jet(const Poly2& poly, Point2 pt, int order) {
    // Taylor shift: coefficients of f(pt + (u, v)) give all partials at once.
    Jet jet;
    jet.base = pt;
    jet.order = order;
    jet.partials.assign(std::size_t(order + 1) * (order + 1), 0.0);
    const Poly2 shifted = poly.composeAffine(1, 0, pt.x, 0, 1, pt.y);
    double fi = 1.0;
    for (int i = 0; i <= order; ++i) {
        double fij = fi;
        for (int j = 0; i + j <= order; ++j) {
            jet.p(i, j) = shifted.at(i, j) * fij;
            fij *= (j + 1);
        }
        fi *= (i + 1);
    }
    return jet;
}

Jet eval_jet(const PolySurface& s, Point2 pt, int order) {
    return eval_jet(s.poly(), pt, order);
}

std::pair<AffineChart, Jet> adapted_chart(const PolySurface& s, Point2 pt,
                                          SlopeDir asymptoticSlope, int jetOrder) {
    Jet j2 = eval_jet(s, pt, 2);
    double fxx = j2.p(2, 0), fxy = j2.p(1, 1), fyy = j2.p(0, 2);
    double scale = std::max({std::abs(fxx), std::abs(fxy), std::abs(fyy), 1e-300});
    double det = fxx * fyy - fxy * fxy;
    if (std::abs(det) > 1e-6 * scale * scale)
        throw AnalysisError("NotParabolic", "Hessian determinant is not small");

    Point2 d = asymptoticSlope.direction();
    Point2 n = perp(d);

    // v-axis points into the hyperbolic side: probe the Hessian determinant
    // off-axis (the parabolic curve is tangent to d at a godron).
    const Poly2& hked = s.deriv(2, 0);
    const Poly2& hked2 = s.deriv(0, 2);
    const Poly2& hked3 = s.deriv(1, 1);
    auto hessAt = [&](Point2 q) {
        return hked.eval(q) * hked2.eval(q) - hked3.eval(q) * hked3.eval(q);
    };
    double lenScale = 1e-2 * (1.0 + norm(pt));
    double side = 0.0;
    for (double eps = lenScale; eps > lenScale / 64; eps *= 0.5) {
        double hPlus = hessAt(pt + eps * n);
        double hMinus = hessAt(pt + (-eps) * n);
        if (hPlus != hMinus) {
            side = (hPlus < hMinus) ? +1.0 : -1.0;
            break;
        }
    }
    if (side == 0.0) side = 1.0;
    Point2 ev = side * n;

    // w toward the positive half-space: at nearby elliptic points the
    // surface lies on the tangent-plane side given by the definite form,
    // whose sign is sign(f_vv) there (f_xx works too away from degeneracy).
    double formSign = 0.0;
    for (double eps = lenScale; eps > lenScale / 128; eps *= 0.5) {
        Point2 probe = pt + (-eps) * ev;
        if (hessAt(probe) > 0) {
            formSign = hked2.eval(probe);
            if (formSign == 0.0) formSign = hked.eval(probe);
            break;
        }
    }
    if (formSign == 0.0) formSign = fyy != 0.0 ? fyy : 1.0;
    int sigma = formSign >= 0 ? 1 : -1;

    // flip e_u so (e_u, e_v, e_w) is a positive frame
    Point2 eu = d;
    if (sigma * cross(eu, ev) < 0) eu = -1.0 * eu;

    AffineChart chart;
    chart.origin3 = s.point3(pt);
    Point2 grad = s.gradient(pt);
    chart.alpha = grad.x;
    chart.beta = grad.y;
    chart.gamma = chart.origin3.z - grad.x * pt.x - grad.y * pt.y;
    chart.linearMap = {eu.x, eu.y, ev.x, ev.y};
    chart.orientationSign = sigma;

    Poly2 F = chart.pushSurface(s);
    Jet jet = eval_jet(F, {0, 0}, jetOrder);
    if (std::abs(jet.p(0, 2)) < 1e-9 * jet.scale())
        throw AnalysisError("DegenerateHessian", "f_vv vanishes after alignment");
    return {chart, jet};
}

}  // namespace godron
