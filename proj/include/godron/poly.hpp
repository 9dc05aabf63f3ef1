#pragma once
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "godron/geometry.hpp"

namespace godron {

// Bivariate polynomial with a dense coefficient table, c[i][j] x^i y^j.
// All operations are exact over the coefficients; evaluation uses Horner
// in y per x-row, then Horner in x, in a fixed order so results are
// reproducible across runs and match the grid kernels bit for bit.
class Poly2 {
public:
    Poly2() : nx_(1), ny_(1), c_(1, 0.0) {}
    Poly2(int degx, int degy) : nx_(degx + 1), ny_(degy + 1), c_(nx_ * ny_, 0.0) {}

    static Poly2 constant(double v);
    static Poly2 variableX();
    static Poly2 variableY();
    static Poly2 fromTerms(const std::map<std::pair<int, int>, double>& terms);

    double& at(int i, int j) { return c_[std::size_t(i) * ny_ + j]; }
    double at(int i, int j) const {
        return (i < nx_ && j < ny_) ? c_[std::size_t(i) * ny_ + j] : 0.0;
    }

    int degX() const { return nx_ - 1; }
    int degY() const { return ny_ - 1; }
    int totalDegree() const;  // -1 for the zero polynomial
    bool isZero() const;
    bool isConstant() const { return totalDegree() <= 0; }

    double eval(double x, double y) const;
    double eval(Point2 p) const { return eval(p.x, p.y); }

    Poly2 dx() const;
    Poly2 dy() const;
    // Repeated exact differentiation, d^(i+j)/dx^i dy^j.
    Poly2 derivative(int i, int j) const;

    Poly2 operator+(const Poly2& o) const;
    Poly2 operator-(const Poly2& o) const;
    Poly2 operator*(const Poly2& o) const;
    Poly2 operator*(double s) const;
    Poly2 operator-() const { return *this * -1.0; }

    // Substitute x = ax*u + bx*v + cx, y = ay*u + by*v + cy. Exact; the
    // result is a polynomial in (u, v) of the same total degree.
    Poly2 composeAffine(double ax, double bx, double cx,
                        double ay, double by, double cy) const;

    // 1-D restriction along a parametrised line t -> (px + t dx, py + t dy).
    // Returns the coefficients of the resulting univariate polynomial in t.
    std::vector<double> restrictLine(Point2 p, Point2 d) const;

    // Sparse view of the nonzero terms, (i, j) -> coefficient.
    std::map<std::pair<int, int>, double> terms() const;

    // Signature for the row-major grid kernels: coefficients of x^i reduced
    // at fixed y, i.e. a_i = sum_j c[i][j] y^j evaluated by Horner.
    void reduceAtY(double y, std::vector<double>& xcoef) const;

    // Largest |coefficient|; cheap scale proxy for tolerances.
    double maxAbsCoeff() const;

    void trim();  // drop trailing all-zero rows/columns

private:
    int nx_, ny_;
    std::vector<double> c_;
};

// Parse error with a 0-based character position into the source text.
class ParseError : public AnalysisError {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : AnalysisError("ParseError", msg + " at position " + std::to_string(pos)),
          position(pos) {}
    std::size_t position;
};

// Expression grammar over x and y: + - * / ^, parentheses, decimal and
// rational literals. '/' requires a constant, nonzero divisor; '^' a
// non-negative integer exponent. Identifiers listed in `params` are
// replaced by their values; any other identifier is rejected.
Poly2 parseExpression(const std::string& text,
                      const std::map<std::string, double>& params = {});

constexpr int kMaxSurfaceDegree = 24;

}  // namespace godron
