#pragma once
#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "godron/geometry.hpp"
#include "godron/poly.hpp"

namespace godron {

// Truncated derivative data of f at a point: partials(i, j) holds
// d^(i+j) f / dx^i dy^j evaluated at base. Raw derivative values, not
// Taylor coefficients; the i! j! factor is applied at use sites.
struct Jet {
    Point2 base;
    int order = 0;
    std::vector<double> partials;  // indexed by (i, j), i + j <= order

    double p(int i, int j) const;
    double& p(int i, int j);
    // Largest |partial|; used as the relative scale for tolerances.
    double scale() const;

    static int indexOf(int i, int j, int order);
};

// Exact bivariate polynomial surface z = f(x, y) with cached derivative
// polynomials. Immutable after construction; safe to share across threads.
class PolySurface {
public:
    PolySurface() = default;
    explicit PolySurface(Poly2 p);

    const Poly2& poly() const { return poly_; }
    int degree() const { return degree_; }

    double eval(double x, double y) const { return poly_.eval(x, y); }
    double eval(Point2 p) const { return poly_.eval(p); }

    // d^(i+j) f / dx^i dy^j as a cached polynomial (built up to order 6 at
    // construction, extended on demand for higher orders).
    const Poly2& deriv(int i, int j) const;
    double deriv(int i, int j, Point2 p) const { return deriv(i, j).eval(p); }

    Point2 gradient(Point2 p) const { return {deriv(1, 0, p), deriv(0, 1, p)}; }
    Point3 point3(Point2 p) const { return {p.x, p.y, eval(p)}; }

private:
    Poly2 poly_;
    int degree_ = 0;
    // dense table up to kCachedOrder, then a sorted overflow map
    static constexpr int kCachedOrder = 6;
    std::vector<Poly2> cache_;
    mutable std::shared_ptr<std::map<std::pair<int, int>, Poly2>> extra_;
};

// Slope of a tangent direction in one of the two affine charts of the
// projectivised slope: P-chart slope = dy/dx, Q-chart slope = dx/dy.
enum class SlopeChart { P, Q };

struct SlopeDir {
    SlopeChart chart = SlopeChart::P;
    double slope = 0.0;

    // Unit direction vector in the plane (orientation-free, sign arbitrary).
    Point2 direction() const;
    static SlopeDir fromDirection(Point2 d);
};

// Affine analysis chart at a surface point: origin on the surface, tangent
// plane z = alpha x + beta y + gamma, a 2x2 linear map sending analysis
// coordinates (u, v) to ambient offsets (x, y), and the sign that points
// the w-axis toward the positive half-space. Ambient 3-space is right-handed
// with the standard basis.
struct AffineChart {
    Point3 origin3;
    double alpha = 0, beta = 0, gamma = 0;  // tangent plane coefficients
    std::array<double, 4> linearMap{1, 0, 0, 1};  // column-major: (m00 m10 m01 m11)
    int orientationSign = 1;

    Point2 colU() const { return {linearMap[0], linearMap[1]}; }
    Point2 colV() const { return {linearMap[2], linearMap[3]}; }
    double det() const { return linearMap[0] * linearMap[3] - linearMap[1] * linearMap[2]; }

    // ambient (x, y) of chart coordinates (u, v)
    Point2 toAmbient(Point2 uv) const;
    // chart coordinates of an ambient point
    Point2 toChart(Point2 xy) const;
    // Height of an ambient surface point over the tangent plane, measured
    // along the w-axis (sign included).
    double heightOverPlane(Point3 p) const;

    // Graph function F(u, v) of the surface in this chart; satisfies
    // F(0,0) = F_u(0,0) = F_v(0,0) = 0 exactly.
    Poly2 pushSurface(const PolySurface& s) const;
};

// --- operations -----------------------------------------------------------

// Parse the surface grammar (expression over x, y; + - * / ^, parentheses,
// decimal and rational literals). Throws ParseError.
PolySurface parse_surface(const std::string& text,
                          const std::map<std::string, double>& params = {});

// Exact partials of f at pt up to the given order (no finite differencing).
Jet eval_jet(const PolySurface& s, Point2 pt, int order);
Jet eval_jet(const Poly2& p, Point2 pt, int order);

// Build the adapted chart at a parabolic point: u-axis along the double
// asymptotic direction, v-axis into the hyperbolic side, w toward the
// positive half-space, (e_u, e_v, e_w) a positive frame. Returns the chart
// and the jet of the pushed surface at the chart origin (order >= 5).
// Throws AnalysisError("NotParabolic") / ("DegenerateHessian").
std::pair<AffineChart, Jet> adapted_chart(const PolySurface& s, Point2 pt,
                                          SlopeDir asymptoticSlope, int jetOrder = 6);

}  // namespace godron
