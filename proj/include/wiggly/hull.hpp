#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "error.hpp"
#include "point.hpp"

namespace wiggly {

// Minimal strip containing a planar point set. `direction` is the unit
// normal along which the width is measured; the mid-line is
// {p : dot(direction, p) == anchor}.
struct StripFit {
    Point direction{1.0, 0.0};
    double width = 0.0;
    double anchor = 0.0;
};

namespace detail {

inline double cross(const Point& o, const Point& a, const Point& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

inline bool lex_less_2d(const Point& a, const Point& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
}

// Unit vector at angle theta in [0, pi); the canonical form of a normal.
inline Point canonical_normal(double nx, double ny) {
    double len = std::hypot(nx, ny);
    if (len == 0.0) return {1.0, 0.0};
    nx /= len;
    ny /= len;
    if (ny < 0.0 || (ny == 0.0 && nx < 0.0)) {
        nx = -nx;
        ny = -ny;
    }
    if (ny == 0.0) nx = 1.0;  // angle 0, avoids -0.0 ambiguity
    return {nx, ny};
}

inline double normal_angle(const Point& n) { return std::atan2(n[1], n[0]); }

}  // namespace detail

// Andrew's monotone chain on points already sorted lexicographically.
// Collinear boundary points are dropped; output is counterclockwise,
// starting at the lexicographically smallest vertex.
inline std::vector<Point> convex_hull_sorted(const std::vector<Point>& pts) {
    const std::size_t n = pts.size();
    if (n == 0) throw DataError("empty point set");
    std::vector<Point> uniq;
    uniq.reserve(n);
    for (const auto& p : pts) {
        if (uniq.empty() || !(uniq.back()[0] == p[0] && uniq.back()[1] == p[1])) uniq.push_back(p);
    }
    if (uniq.size() <= 2) return uniq;
    std::vector<Point> h(2 * uniq.size());
    std::size_t k = 0;
    for (const auto& p : uniq) {
        while (k >= 2 && detail::cross(h[k - 2], h[k - 1], p) <= 0.0) --k;
        h[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = uniq.size() - 1; i-- > 0;) {
        const auto& p = uniq[i];
        while (k >= lower && detail::cross(h[k - 2], h[k - 1], p) <= 0.0) --k;
        h[k++] = p;
    }
    h.resize(k - 1);
    if (h.size() == 2 && h[0][0] == h[1][0] && h[0][1] == h[1][1]) h.resize(1);
    return h;
}

inline std::vector<Point> convex_hull(std::vector<Point> pts) {
    if (pts.empty()) throw DataError("empty point set");
    std::sort(pts.begin(), pts.end(), detail::lex_less_2d);
    return convex_hull_sorted(pts);
}

// Rotating calipers over a counterclockwise hull. Among edges that attain
// the minimal width (to 1e-12 relative), the normal with the smallest angle
// in [0, pi) is reported.
inline StripFit min_width_strip_of_hull(const std::vector<Point>& hull) {
    StripFit fit;
    const std::size_t m = hull.size();
    if (m == 0) throw DataError("empty point set");
    if (m == 1) {
        fit.direction = {1.0, 0.0};
        fit.anchor = hull[0][0];
        return fit;
    }
    if (m == 2) {
        const Point e = hull[1] - hull[0];
        fit.direction = detail::canonical_normal(-e[1], e[0]);
        fit.anchor = dot(fit.direction, hull[0]);
        return fit;
    }
    double scale = 0.0;
    for (const auto& p : hull) scale = std::max(scale, std::abs(p[0]) + std::abs(p[1]));
    const double tol = 1e-12 * std::max(scale, 1e-300);

    double best = INFINITY;
    Point best_n{1.0, 0.0};
    std::size_t j = 1;
    for (std::size_t i = 0; i < m; ++i) {
        const Point& a = hull[i];
        const Point& b = hull[(i + 1) % m];
        const double elen = std::hypot(b[0] - a[0], b[1] - a[1]);
        if (elen == 0.0) continue;
        auto area = [&](std::size_t idx) { return detail::cross(a, b, hull[idx % m]); };
        while (area(j + 1) > area(j)) j = (j + 1) % m;
        const double w = area(j) / elen;
        const Point n = detail::canonical_normal(-(b[1] - a[1]), b[0] - a[0]);
        if (w < best - tol ||
            (std::abs(w - best) <= tol && detail::normal_angle(n) < detail::normal_angle(best_n))) {
            best = std::min(best, w);
            best_n = n;
        }
    }
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& p : hull) {
        const double s = dot(best_n, p);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    fit.direction = best_n;
    fit.width = std::max(0.0, hi - lo);
    fit.anchor = 0.5 * (lo + hi);
    return fit;
}

inline StripFit min_width_strip(const std::vector<Point>& pts) {
    return min_width_strip_of_hull(convex_hull(pts));
}

// Farthest pair of vertices of a convex polygon given counterclockwise.
inline std::pair<Point, Point> hull_diameter_pair(const std::vector<Point>& hull) {
    const std::size_t m = hull.size();
    if (m == 0) throw DataError("empty point set");
    if (m == 1) return {hull[0], hull[0]};
    if (m == 2) return {hull[0], hull[1]};
    double best = -1.0;
    std::pair<Point, Point> out{hull[0], hull[1]};
    std::size_t j = 1;
    auto offer = [&](const Point& p, const Point& q) {
        const double d = dist2(p, q);
        if (d > best) {
            best = d;
            out = {p, q};
        }
    };
    for (std::size_t i = 0; i < m; ++i) {
        const Point& a = hull[i];
        const Point& b = hull[(i + 1) % m];
        auto area = [&](std::size_t idx) { return detail::cross(a, b, hull[idx % m]); };
        while (area(j + 1) > area(j)) j = (j + 1) % m;
        offer(a, hull[j]);
        offer(b, hull[j]);
    }
    return out;
}

// Diameter of a convex polygon given counterclockwise.
inline double hull_diameter_of_hull(const std::vector<Point>& hull) {
    if (hull.size() <= 1) return 0.0;
    const auto [p, q] = hull_diameter_pair(hull);
    return dist(p, q);
}

// Largest distance from a point to the least-squares line through the set,
// doubled. Used as the width surrogate when the ambient dimension exceeds 2.
inline double principal_axis_width(const std::vector<Point>& pts) {
    if (pts.empty()) throw DataError("empty point set");
    if (pts.size() <= 2) return 0.0;
    Point mean;
    for (const auto& p : pts) mean = mean + p;
    mean = (1.0 / static_cast<double>(pts.size())) * mean;
    double cov[3][3] = {};
    for (const auto& p : pts) {
        const Point d = p - mean;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) cov[a][b] += d[a] * d[b];
    }
    Point v{1.0, 0.7, 0.3};
    for (int it = 0; it < 200; ++it) {
        Point w;
        for (int a = 0; a < 3; ++a) w[a] = cov[a][0] * v[0] + cov[a][1] * v[1] + cov[a][2] * v[2];
        const double len = norm(w);
        if (len == 0.0) return 0.0;
        v = (1.0 / len) * w;
    }
    double worst = 0.0;
    for (const auto& p : pts) {
        const Point d = p - mean;
        const double along = dot(d, v);
        worst = std::max(worst, std::sqrt(std::max(0.0, dot(d, d) - along * along)));
    }
    return 2.0 * worst;
}

}  // namespace wiggly
