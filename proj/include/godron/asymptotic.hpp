#pragma once
#include <optional>
#include <vector>

#include "godron/geometry.hpp"
#include "godron/surface.hpp"

namespace godron {

// Point on (or near) the asymptotic double {A^f = 0} in (x, y, slope) space.
struct LiftedPoint {
    double x = 0, y = 0;
    double slope = 0;
    SlopeChart chart = SlopeChart::P;

    Point2 xy() const { return {x, y}; }
    SlopeDir dir() const { return {chart, slope}; }
};

// One connected component of the parabolic curve inside the window.
struct ParabolicTrace {
    PlanarCurve curve;
    bool jordan = false;
    // side of the traversal direction on which the hyperbolic domain lies
    enum class Side { Left, Right } hyperbolicSide = Side::Left;
};

// Quadratic in the slope: P-chart f_xx + 2 f_xy p + f_yy p^2,
// Q-chart f_yy + 2 f_xy q + f_xx q^2.
double asymptote_eval(const Jet& j, double slope, SlopeChart chart);

// f_xx f_yy - f_xy^2; negative on the hyperbolic domain.
double hessian_det(const PolySurface& s, Point2 pt);

// The Hessian determinant as an exact polynomial (used by tracing and the
// grid kernels).
Poly2 hessianPoly(const PolySurface& s);

// Zero set of a polynomial field over the window: marching squares on a
// res x res grid, ambiguous cells resolved by subdivision (up to 4 levels),
// every vertex Newton-polished transverse to the contour.
// Throws AnalysisError("ResolutionTooCoarse") when subdivision fails.
std::vector<PlanarCurve> trace_zero_set(const Poly2& field, Window window, int resolution,
                                        double polishTolRel = 1e-9);

std::vector<ParabolicTrace> trace_parabolic(const PolySurface& s, Window window,
                                            int resolution);

// Real asymptotic directions at a point, each in its well-conditioned chart.
// multiplicity 2 marks the double root at parabolic points.
struct AsymptoticSlopes {
    std::vector<SlopeDir> dirs;
    std::vector<int> multiplicity;
};
AsymptoticSlopes asymptotic_slopes(const PolySurface& s, Point2 pt);

// Tangent vector of the lifted asymptotic field at a point of the double:
// (A_p, p A_p, -(A_x + p A_y)) in the P-chart, components ordered
// (d x, d y, d slope) for the point's chart. Vanishes exactly over godrons.
// Throws AnalysisError("OffSurface") when |A| is too large at lp.
Point3 lifted_field_eval(const PolySurface& s, const LiftedPoint& lp);

struct IntegrationResult {
    SpaceCurve curve;              // on the surface, z = f(x, y)
    std::vector<LiftedPoint> lifted;
    std::vector<Warning> warnings;  // SingularEncounter is reported here
};

// Integrate the lifted asymptotic field from a seed on the double.
// Adaptive embedded RK with projection back onto {A = 0} after each step;
// stops at the window boundary, the arc-length budget (measured on the
// surface curve), or inside the tolerance ball of a lifted-field zero.
IntegrationResult integrate_asymptotic(const PolySurface& s, LiftedPoint seed,
                                       double arcLength, Window window,
                                       double maxStep = 0.0);

// det Hess / (1 + f_x^2 + f_y^2)^2
double gaussian_curvature(const PolySurface& s, Point2 pt);

// Torsion at sample `index` by divided differences on a 5-sample stencil.
// Throws AnalysisError("DegenerateFrame") when the first two derivatives
// are parallel.
double frenet_torsion(const SpaceCurve& c, std::size_t index);

// Derivatives of a sampled curve at `index` by local polynomial fit over
// 2*half+1 samples (divided differences; tolerates non-uniform spacing).
void curveDerivatives(const SpaceCurve& c, std::size_t index, int half, Point3& d1,
                      Point3& d2, Point3& d3);

}  // namespace godron
