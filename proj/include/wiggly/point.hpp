#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace wiggly {

inline constexpr int kMaxDim = 3;

// Coordinates beyond the ambient dimension are kept at zero, so distances
// are correct for planar data without carrying the dimension around.
struct Point {
    std::array<double, kMaxDim> c{0.0, 0.0, 0.0};

    Point() = default;
    Point(double x, double y, double z = 0.0) : c{x, y, z} {}

    double& operator[](std::size_t i) { return c[i]; }
    double operator[](std::size_t i) const { return c[i]; }
    double x() const { return c[0]; }
    double y() const { return c[1]; }

    friend bool operator==(const Point& a, const Point& b) { return a.c == b.c; }
    friend bool operator<(const Point& a, const Point& b) { return a.c < b.c; }
};

inline Point operator+(const Point& a, const Point& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Point operator-(const Point& a, const Point& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Point& a, const Point& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double dist2(const Point& a, const Point& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}
inline double dist(const Point& a, const Point& b) { return std::sqrt(dist2(a, b)); }
inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }

inline bool is_finite(const Point& p) {
    return std::isfinite(p[0]) && std::isfinite(p[1]) && std::isfinite(p[2]);
}

// Membership test for closed balls. The relative slack absorbs rounding in
// the squared distance so that points placed exactly on the sphere count.
inline bool in_closed_ball(const Point& p, const Point& center, double r) {
    return dist2(p, center) <= r * r * (1.0 + 1e-12);
}

}  // namespace wiggly
