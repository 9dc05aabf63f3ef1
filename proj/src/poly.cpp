#include "godron/poly.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace godron {

Poly2 Poly2::constant(double v) {
    Poly2 p;
    p.at(0, 0) = v;
    return p;
}

Poly2 Poly2::variableX() {
    Poly2 p(1, 0);
    p.at(1, 0) = 1.0;
    return p;
}

Poly2 Poly2::variableY() {
    Poly2 p(0, 1);
    p.at(0, 1) = 1.0;
    return p;
}

Poly2 Poly2::fromTerms(const std::map<std::pair<int, int>, double>& terms) {
    int dx = 0, dy = 0;
    for (const auto& [ij, v] : terms) {
        (void)v;
        dx = std::max(dx, ij.first);
        dy = std::max(dy, ij.second);
    }
    Poly2 p(dx, dy);
    for (const auto& [ij, v] : terms) p.at(ij.first, ij.second) = v;
    return p;
}

int Poly2::totalDegree() const {
    int deg = -1;
    for (int i = 0; i < nx_; ++i)
        for (int j = 0; j < ny_; ++j)
            if (at(i, j) != 0.0) deg = std::max(deg, i + j);
    return deg;
}

bool Poly2::isZero() const {
    for (double v : c_)
        if (v != 0.0) return false;
    return true;
}

double Poly2::eval(double x, double y) const {
    double acc = 0.0;
    for (int i = nx_ - 1; i >= 0; --i) {
        const double* row = &c_[std::size_t(i) * ny_];
        double r = 0.0;
        for (int j = ny_ - 1; j >= 0; --j) r = r * y + row[j];
        acc = acc * x + r;
    }
    return acc;
}

void Poly2::reduceAtY(double y, std::vector<double>& xcoef) const {
    xcoef.resize(nx_);
    for (int i = 0; i < nx_; ++i) {
        const double* row = &c_[std::size_t(i) * ny_];
        double r = 0.0;
        for (int j = ny_ - 1; j >= 0; --j) r = r * y + row[j];
        xcoef[i] = r;
    }
}

Poly2 Poly2::dx() const {
    if (nx_ == 1) return Poly2();
    Poly2 p(nx_ - 2, ny_ - 1);
    for (int i = 1; i < nx_; ++i)
        for (int j = 0; j < ny_; ++j) p.at(i - 1, j) = i * at(i, j);
    return p;
}

Poly2 Poly2::dy() const {
    if (ny_ == 1) return Poly2();
    Poly2 p(nx_ - 1, ny_ - 2);
    for (int i = 0; i < nx_; ++i)
        for (int j = 1; j < ny_; ++j) p.at(i, j - 1) = j * at(i, j);
    return p;
}

Poly2 Poly2::derivative(int i, int j) const {
    Poly2 p = *this;
    for (int k = 0; k < i; ++k) p = p.dx();
    for (int k = 0; k < j; ++k) p = p.dy();
    return p;
}

Poly2 Poly2::operator+(const Poly2& o) const {
    Poly2 p(std::max(nx_, o.nx_) - 1, std::max(ny_, o.ny_) - 1);
    for (int i = 0; i < p.nx_; ++i)
        for (int j = 0; j < p.ny_; ++j) p.at(i, j) = at(i, j) + o.at(i, j);
    return p;
}

Poly2 Poly2::operator-(const Poly2& o) const {
    Poly2 p(std::max(nx_, o.nx_) - 1, std::max(ny_, o.ny_) - 1);
    for (int i = 0; i < p.nx_; ++i)
        for (int j = 0; j < p.ny_; ++j) p.at(i, j) = at(i, j) - o.at(i, j);
    return p;
}

Poly2 Poly2::operator*(const Poly2& o) const {
    Poly2 p(nx_ + o.nx_ - 2, ny_ + o.ny_ - 2);
    for (int i = 0; i < nx_; ++i)
        for (int j = 0; j < ny_; ++j) {
            double v = at(i, j);
            if (v == 0.0) continue;
            for (int k = 0; k < o.nx_; ++k)
                for (int l = 0; l < o.ny_; ++l) p.at(i + k, j + l) += v * o.at(k, l);
        }
    return p;
}

Poly2 Poly2::operator*(double s) const {
    Poly2 p = *this;
    for (double& v : p.c_) v *= s;
    return p;
}

Poly2 Poly2::composeAffine(double ax, double bx, double cx,
                           double ay, double by, double cy) const {
    Poly2 X(1, 1), Y(1, 1);
    X.at(1, 0) = ax;
    X.at(0, 1) = bx;
    X.at(0, 0) = cx;
    Y.at(1, 0) = ay;
    Y.at(0, 1) = by;
    Y.at(0, 0) = cy;
    // Horner over x-rows, each row reduced by Horner in Y first.
    Poly2 acc;
    for (int i = nx_ - 1; i >= 0; --i) {
        Poly2 row;
        for (int j = ny_ - 1; j >= 0; --j) row = row * Y + Poly2::constant(at(i, j));
        acc = acc * X + row;
    }
    acc.trim();
    return acc;
}

std::vector<double> Poly2::restrictLine(Point2 p, Point2 d) const {
    // Substitute x = p.x + t d.x, y = p.y + t d.y; Horner with univariate
    // polynomial arithmetic in t. Trailing entries beyond the total degree
    // are exact zeros and kept; callers treat the result as a plain
    // coefficient array.
    std::vector<double> acc(1, 0.0), row, tmp;
    auto mulAdd = [&](std::vector<double>& a, double off, double lin, double cst) {
        // a <- a * (off + lin t) + cst
        tmp.assign(a.size() + 1, 0.0);
        for (std::size_t k = 0; k < a.size(); ++k) {
            tmp[k] += a[k] * off;
            tmp[k + 1] += a[k] * lin;
        }
        tmp[0] += cst;
        a.swap(tmp);
    };
    for (int i = nx_ - 1; i >= 0; --i) {
        row.assign(1, 0.0);
        for (int j = ny_ - 1; j >= 0; --j) mulAdd(row, p.y, d.y, at(i, j));
        mulAdd(acc, p.x, d.x, 0.0);
        acc.resize(std::max(acc.size(), row.size()), 0.0);
        for (std::size_t k = 0; k < row.size(); ++k) acc[k] += row[k];
    }
    return acc;
}

std::map<std::pair<int, int>, double> Poly2::terms() const {
    std::map<std::pair<int, int>, double> t;
    for (int i = 0; i < nx_; ++i)
        for (int j = 0; j < ny_; ++j)
            if (at(i, j) != 0.0) t[{i, j}] = at(i, j);
    return t;
}

double Poly2::maxAbsCoeff() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

void Poly2::trim() {
    int mx = 0, my = 0;
    for (int i = 0; i < nx_; ++i)
        for (int j = 0; j < ny_; ++j)
            if (at(i, j) != 0.0) {
                mx = std::max(mx, i);
                my = std::max(my, j);
            }
    if (mx == nx_ - 1 && my == ny_ - 1) return;
    Poly2 p(mx, my);
    for (int i = 0; i <= mx; ++i)
        for (int j = 0; j <= my; ++j) p.at(i, j) = at(i, j);
    *this = p;
}

// ---------------------------------------------------------------------------
// Expression parser (recursive descent).

namespace {

struct Parser {
    const std::string& s;
    const std::map<std::string, double>& params;
    std::size_t pos = 0;

    Parser(const std::string& text, const std::map<std::string, double>& pa)
        : s(text), params(pa) {}

    void skipWs() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool peek(char c) {
        skipWs();
        return pos < s.size() && s[pos] == c;
    }

    bool accept(char c) {
        if (peek(c)) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

    void checkDegree(const Poly2& p) {
        if (p.totalDegree() > kMaxSurfaceDegree)
            fail("degree overflow (> " + std::to_string(kMaxSurfaceDegree) + ")");
    }

    Poly2 parseExpr() {
        Poly2 v = parseTerm();
        for (;;) {
            if (accept('+'))
                v = v + parseTerm();
            else if (accept('-'))
                v = v - parseTerm();
            else
                return v;
        }
    }

    Poly2 parseTerm() {
        Poly2 v = parseFactor();
        for (;;) {
            if (accept('*')) {
                v = v * parseFactor();
                checkDegree(v);
            } else if (accept('/')) {
                std::size_t opPos = pos - 1;
                Poly2 d = parseFactor();
                if (!d.isConstant())
                    throw ParseError("unsupported operator: division by non-constant", opPos);
                double dv = d.at(0, 0);
                if (dv == 0.0) throw ParseError("division by zero", opPos);
                v = v * (1.0 / dv);
            } else {
                return v;
            }
        }
    }

    Poly2 parseFactor() {
        int sign = 1;
        for (;;) {
            if (accept('-'))
                sign = -sign;
            else if (accept('+'))
                ;
            else
                break;
        }
        Poly2 v = parsePower();
        return sign < 0 ? -v : v;
    }

    Poly2 parsePower() {
        Poly2 base = parseAtom();
        while (accept('^')) {
            std::size_t opPos = pos;
            skipWs();
            bool paren = accept('(');
            skipWs();
            std::size_t numPos = pos;
            double e = parseNumber();
            if (paren && !accept(')')) fail("expected ')'");
            double ri = std::round(e);
            if (e != ri || ri < 0)
                throw ParseError("exponent must be a non-negative integer", numPos);
            int n = static_cast<int>(ri);
            if (base.totalDegree() > 0 && base.totalDegree() * n > kMaxSurfaceDegree)
                throw ParseError("degree overflow (> " + std::to_string(kMaxSurfaceDegree) + ")",
                                 opPos);
            Poly2 r = Poly2::constant(1.0);
            for (int k = 0; k < n; ++k) r = r * base;
            base = r;
        }
        return base;
    }

    double parseNumber() {
        skipWs();
        std::size_t start = pos;
        while (pos < s.size() &&
               (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) {
            ++pos;
        }
        if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
            std::size_t save = pos;
            ++pos;
            if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
            if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            } else {
                pos = save;
            }
        }
        if (pos == start) fail("expected a number");
        double v = 0.0;
        auto res = std::from_chars(s.data() + start, s.data() + pos, v);
        if (res.ec != std::errc{}) throw ParseError("malformed number", start);
        return v;
    }

    Poly2 parseAtom() {
        skipWs();
        if (pos >= s.size()) fail("unexpected end of expression");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            Poly2 v = parseExpr();
            if (!accept(')')) fail("expected ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return Poly2::constant(parseNumber());
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos;
            while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                                      s[pos] == '_')) {
                ++pos;
            }
            std::string name = s.substr(start, pos - start);
            if (name == "x") return Poly2::variableX();
            if (name == "y") return Poly2::variableY();
            auto it = params.find(name);
            if (it != params.end()) return Poly2::constant(it->second);
            throw ParseError("unknown identifier '" + name + "'", start);
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace

Poly2 parseExpression(const std::string& text, const std::map<std::string, double>& params) {
    Parser p(text, params);
    Poly2 v = p.parseExpr();
    p.skipWs();
    if (p.pos != text.size()) p.fail("trailing input");
    v.trim();
    if (v.totalDegree() > kMaxSurfaceDegree)
        throw ParseError("degree overflow (> " + std::to_string(kMaxSurfaceDegree) + ")", 0);
    return v;
}

}  // namespace godron
