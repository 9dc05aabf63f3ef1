#pragma once
#include <vector>

#include "godron/asymptotic.hpp"
#include "godron/geometry.hpp"
#include "godron/surface.hpp"

namespace godron {

enum class BranchLabel { Left, Right, Flattening };

// Connected component of {A = 0, I = 0} traced in (x, y, slope) space,
// with its projection to the plane and per-sample left/right labels.
struct FlecnodalTrace {
    std::vector<LiftedPoint> lifted;
    PlanarCurve projected;
    std::vector<BranchLabel> labels;  // empty until label_branches runs
    bool closed = false;
    bool ruled = false;  // straight-line component (residual identically zero)
};

struct Hyperbonode {
    Point2 location;
    double angle = 0;            // crossing angle of the two branches
    std::size_t traceA = 0, traceB = 0;
    BranchLabel labelA = BranchLabel::Left, labelB = BranchLabel::Right;
};

struct HyperbonodeSearch {
    std::vector<Hyperbonode> hyperbonodes;
    std::vector<Hyperbonode> anomalies;  // same-label transverse crossings
};

struct Biflecnode {
    Point2 location;
    SlopeDir slope;
    BranchLabel side = BranchLabel::Left;
    std::size_t trace = 0;
};

// I^{A}(x, y, slope): the cubic form along the direction, P-chart
// f_xxx + 3 f_xxy p + 3 f_xyy p^2 + f_yyy p^3 (Q-chart mirrored).
double inflection_eval(const Jet& j, double slope, SlopeChart chart);

// Trace all components of the lifted flecnodal set inside the window by
// pseudo-arclength continuation from grid seeds. Projections lie in the
// closed hyperbolic domain. Labels are not assigned here.
std::vector<FlecnodalTrace> trace_flecnodal(const PolySurface& s, Window window,
                                            int resolution);

// Contact order at pt of the tangent line along `direction` with the graph:
// smallest k with a nonvanishing t^k term of the height along the line,
// or maxOrder + 1 when every term through maxOrder vanishes (meaning ">=").
int contact_order(const PolySurface& s, Point2 pt, Point2 direction, int maxOrder);

// Frame sign of a sampled space curve at `index`: Right for a positive
// det(c', c'', c'''), Left for negative, Flattening below tolerance.
BranchLabel left_right_label(const SpaceCurve& c, std::size_t index,
                             double tolRel = 1e-8);

// Label every sample of a trace by the frame sign of the asymptotic curve
// through it along the flecnodal slope. The sign is evaluated in closed
// form: along an asymptotic curve det(g',g'',g''') = I^2 / (2 A_p) with the
// ambient factors positive, so away from godrons the label is the sign of
// A_p (P-chart; mirrored with a sign flip in the Q-chart).
FlecnodalTrace label_branches(FlecnodalTrace t, const PolySurface& s);

// Frame sign of the asymptotic curve through a lifted point (the torsion
// sign); used by label_branches and exposed for cross-checks.
BranchLabel asymptoticFrameSign(const PolySurface& s, const LiftedPoint& lp,
                                double tolRel = 1e-9);

// Transverse Left x Right crossings of labeled traces, deduplicated;
// same-label crossings are reported as anomalies.
HyperbonodeSearch find_hyperbonodes(const std::vector<FlecnodalTrace>& traces,
                                    double dedupRadius = 0.0);

// Zeros along the trace of the 4th-order coefficient of the height along
// the asymptotic line (5-point-contact residual), polished by bisection.
// Ruled components are tagged on the trace and skipped.
std::vector<Biflecnode> find_biflecnodes(FlecnodalTrace& t, const PolySurface& s);

// The residual itself: t^4 coefficient of the height of the graph over its
// tangent line at pt along the (unit) direction.
double quarticContactResidual(const PolySurface& s, Point2 pt, Point2 direction);

}  // namespace godron
