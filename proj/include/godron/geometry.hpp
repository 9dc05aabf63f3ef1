#pragma once
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace godron {

struct Point2 {
    double x = 0.0, y = 0.0;
};

struct Point3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline Point2 perp(Point2 a) { return {-a.y, a.x}; }

inline Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Point3 operator*(double s, Point3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Point3 a, Point3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Point3 cross(Point3 a, Point3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Point3 a) { return std::sqrt(dot(a, a)); }
inline double det3(Point3 a, Point3 b, Point3 c) { return dot(a, cross(b, c)); }

// Axis-aligned analysis window.
struct Window {
    double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double diagonal() const { return std::hypot(width(), height()); }
    bool contains(Point2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    bool degenerate() const { return !(x1 > x0) || !(y1 > y0); }
};

// Ordered samples of a curve in the plane. Consecutive duplicates are merged
// on construction; a closed curve repeats its first sample at the end.
struct PlanarCurve {
    std::vector<Point2> samples;
    std::vector<double> params;  // optional, matches samples when non-empty
    bool closed = false;
    std::string tag;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

struct SpaceCurve {
    std::vector<Point3> samples;
    std::vector<double> params;
    bool closed = false;
    std::string tag;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

// Analysis errors carry a short machine-readable code plus a message.
class AnalysisError : public std::runtime_error {
public:
    AnalysisError(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct Warning {
    std::string code;
    std::string message;
};

}  // namespace godron
