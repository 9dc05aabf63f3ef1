#pragma once
#include <optional>
#include <string>
#include <vector>

#include "godron/asymptotic.hpp"
#include "godron/flecnodal.hpp"
#include "godron/geometry.hpp"
#include "godron/surface.hpp"

namespace godron {

struct GodronSeed {
    Point2 location;
    SlopeDir slope;
};

// 2-jet coefficients of the tangent curves at a godron, measured in the
// adapted chart, plus the tangent-section and contour pairs when present.
// A linear chart change multiplies all of them by a common factor, so the
// ratios to cS are the chart-free quantities.
struct CanonicalCoefficients {
    std::optional<double> cF, cP, cD, cS;
    std::optional<double> cTminus, cTplus;
    std::optional<double> cCminus, cCplus;
};

struct ClassLabels {
    std::string sixConfig;       // interval of the F/P/D configuration
    std::string contourConfig;   // 7 intervals against the g-contour
    std::string sectionConfig;   // 7 intervals against the tangent section
    std::string swallowtail4;    // e / h1 / h2 / h3
    std::string swallowtail7;    // e1 / e2 / e3 / h1 / h2 / h31 / h32
    std::string sContour6;       // trivial / h11 / h12 / h13 / h2 / h31 / h32
    std::string convexity;       // hyperbolic-convex / elliptic-convex
    std::vector<std::string> boundaryFlags;  // thresholds within 1e-6
};

// classify_godron: pure interval lookup against the threshold set
// {-sqrt7/2, -sqrt3/2, -1/2, 0, 1/2, 2/3, 8/9, sqrt3/2, 1, sqrt7/2, 4/3}.
// Throws AnalysisError("DegenerateRho") inside the |rho| / |rho-1| gates.
ClassLabels classify_godron(double rho, double degenerateGate = 1e-4);

struct RhoDiagnostics {
    double rhoParabolic = 0;                // from cP/cS = 3 rho - 2
    double rhoFlecnodal = 0;                // from cF/cS = rho (2 rho - 1)
    std::optional<double> rhoCrossRatio;    // (cF - cD) / (cP - cD)
    double rhoJet = 0;                      // F_vv F_uuuu / (3 F_uuv^2)
    double maxPairwiseDeviation = 0;
    bool inconsistent = false;              // deviation > 0.05
    bool warned = false;                    // deviation > 1e-3
};

struct IndexResult {
    int index = 0;     // +1 node/focus, -1 saddle
    int winding = 0;   // winding number of the lifted field on small circles
    int detSign = 0;   // sign of the linearization determinant
    bool consistent = true;
};

struct GodronRecord {
    Point2 location;
    SlopeDir slope;
    AffineChart chart;
    double rho = 0;
    RhoDiagnostics rhoDiagnostics;
    IndexResult index;
    CanonicalCoefficients coeffs;
    std::optional<ClassLabels> labels;  // absent when rho is degenerate
    bool nearFlecGodron = false;        // |rho| below the gate
    bool nearBigodron = false;          // |rho - 1| below the gate
    std::vector<std::string> flags;     // machine-readable warnings
    // local traces in ambient coordinates, for reports and figures
    PlanarCurve parabolicLocal, flecnodalLocal, conodalLocal;
    PlanarCurve sectionMinus, sectionPlus, contourMinus, contourPlus;
};

// All solutions of {A = 0, A_slope = 0, I = 0} inside the window, found by
// sign changes of the cubic form along traced parabolic curves and polished
// by a 3x3 Newton to residual < 1e-10 * scale; sorted lexicographically.
std::vector<GodronSeed> find_godrons(const PolySurface& s, Window window, int resolution);

// As above but reusing parabolic traces the caller already has.
std::vector<GodronSeed> find_godrons_on(const PolySurface& s,
                                        const std::vector<ParabolicTrace>& traces);

// Winding number of the lifted asymptotic field around the godron lift on
// circles of doubling radius, cross-checked against the sign of the exact
// linearization determinant.
IndexResult godron_index(const PolySurface& s, const GodronSeed& g);

struct FitResult {
    double value = 0;   // quadratic coefficient
    double error = 0;   // Richardson error estimate
    double cubic = 0;   // cubic coefficient (same fit)
};

// Least-squares v = c2 u^2 + c3 u^3 over |u| <= h, Richardson-extrapolated
// over h and h/2. Curve must be tangent to the u-axis at the origin.
// Throws AnalysisError("InsufficientSamples").
FitResult canonical_fit(const PlanarCurve& chartCurve, double halfWidth);

// Working context for the local analysis of one godron.
struct GodronContext {
    GodronSeed seed;
    AffineChart chart;
    Jet jet;          // adapted jet, order >= 5
    double alphaHat;  // -F_uuv / (2 F_vv): predicted cS in this chart
    double rhoJet;    // F_vv F_uuuu / (3 F_uuv^2)
    double fitHalfWidth;
};

GodronContext prepare_godron(const PolySurface& s, const GodronSeed& g,
                             double fitHalfWidth);

// Separating 2-jet coefficient: bisection over c of the cusp-direction sign
// of the dual image of t -> (t, c t^2); the sign function is the quadratic
// coefficient of the dual curve along the common cusp tangent, extracted
// exactly from the jet. Throws AnalysisError("NoSignChange").
double separating_jet(const PolySurface& s, const GodronContext& ctx);

// Local conodal curve through the godron: continuation on the bitangency
// system in pair space, seeded from the normal-form approximation.
// Returns the contact locus in ambient coordinates (empty on SeedFailure,
// with a flag in *failure when given).
PlanarCurve trace_conodal_local(const PolySurface& s, const GodronContext& ctx,
                                std::string* failure = nullptr);

// Local parabolic / flecnodal arcs through the godron as chart graphs
// v(u), solved pointwise by Newton; ambient coordinates.
PlanarCurve local_parabolic(const PolySurface& s, const GodronContext& ctx);
PlanarCurve local_flecnodal(const PolySurface& s, const GodronContext& ctx);

struct RhoResult {
    double rho = 0;
    RhoDiagnostics diagnostics;
    CanonicalCoefficients coeffs;
};

// The cr-invariant with cross-validated routes. Route precedence: the
// cross-ratio (cF - cD)/(cP - cD) when the conodal continuation succeeds,
// else the parabolic route (cP/cS + 2)/3.
RhoResult cr_invariant(const PolySurface& s, const GodronContext& ctx);

struct LocalBranches {
    bool trivial = false;
    std::optional<double> cMinus, cPlus;   // fitted chart coefficients
    PlanarCurve branchMinus, branchPlus;   // ambient samples
};

// Tangent section of the surface at the godron: two branches with
// coefficients cS (1 -+ sqrt(1 - rho)) for rho < 1, trivial for rho > 1.
LocalBranches tangent_section_local(const PolySurface& s, const GodronContext& ctx,
                                    double rho);

// Critical set of the central projection from the godron (the g-contour):
// branches with coefficients cS (2 -+ sqrt(4 - 3 rho)) for rho < 4/3.
LocalBranches g_contour_local(const PolySurface& s, const GodronContext& ctx, double rho);

struct GodronOptions {
    double fitHalfWidth = 0;   // 0: derived from the window diagonal
    bool sections = false;
    bool contours = false;
};

// Full per-godron analysis: chart, rho routes, index, classification,
// local traces, degeneracy flags.
GodronRecord build_godron_record(const PolySurface& s, const GodronSeed& seed,
                                 Window window, const GodronOptions& opts = {});

// Height of a traced curve over the godron's tangent plane: normalized
// first/second/third parameter-derivative residuals at the godron (they
// vanish for curves tangent to the parabolic curve there). The stencil is
// re-polished onto the exact defining system of the curve kind.
enum class TangentCurveKind { Parabolic, Flecnodal, Conodal };
Point3 flattening_residuals(const PolySurface& s, const GodronContext& ctx,
                            TangentCurveKind kind, double delta = 0);

// Derivative at 0 of (asymptotic slope - parabolic tangent slope) along the
// parabolic curve, measured in the adapted chart. Its sign is -sign(rho-1).
double slope_difference_derivative(const PolySurface& s, const GodronContext& ctx);

}  // namespace godron
