#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "error.hpp"
#include "hull.hpp"
#include "point.hpp"
#include "sample.hpp"

namespace wiggly {

struct Ball {
    Point center;
    double radius = 0.0;
};

struct GeometryOptions {
    double resolution_guard = 10.0;
};

// Square of the dyadic grid of a root square Q0 with lower-left corner
// `root_corner` and side `root_side`.
struct DyadicSquare {
    Point root_corner;
    double root_side = 1.0;
    int depth = 0;
    long long ix = 0;
    long long iy = 0;

    double side() const { return std::ldexp(root_side, -depth); }
    Point corner() const {
        const double s = side();
        return {root_corner[0] + static_cast<double>(ix) * s, root_corner[1] + static_cast<double>(iy) * s};
    }
    Point center() const {
        const double s = side();
        const Point c = corner();
        return {c[0] + 0.5 * s, c[1] + 0.5 * s};
    }
};

// The dyadic square of depth k containing p (half-open cells; the top and
// right edges of Q0 belong to the last cell).
inline DyadicSquare dyadic_square_containing(const Point& root_corner, double root_side, int depth, const Point& p) {
    DyadicSquare q{root_corner, root_side, depth, 0, 0};
    const long long n = 1LL << depth;
    const double s = q.side();
    q.ix = std::clamp(static_cast<long long>(std::floor((p[0] - root_corner[0]) / s)), 0LL, n - 1);
    q.iy = std::clamp(static_cast<long long>(std::floor((p[1] - root_corner[1]) / s)), 0LL, n - 1);
    return q;
}

struct BetaResult {
    double beta = 0.0;
    bool empty = false;
    bool approximate = false;
    std::size_t count = 0;
    StripFit fit;
};

namespace detail {

inline void check_scale(const TaggedSample& s, double r, const GeometryOptions& opt) {
    if (!(r > 0.0) || r < opt.resolution_guard * s.resolution * (1.0 - 1e-12))
        throw ResolutionError("scale below resolution");
}

// Sample points inside the closed ball B(x, r), optionally also inside the
// closed ball `within`, in lexicographic order.
inline std::vector<Point> gather_ball(const TaggedSample& s, const Point& x, double r, const Ball* within = nullptr) {
    const auto& idx = *s.index;
    std::vector<std::uint32_t> ranks;
    idx.tree.for_each_in_ball(x, r, [&](std::uint32_t i) {
        if (within == nullptr || in_closed_ball(idx.pts[i], within->center, within->radius))
            ranks.push_back(idx.lex_rank[i]);
    });
    std::sort(ranks.begin(), ranks.end());
    std::vector<Point> out;
    out.reserve(ranks.size());
    for (auto rk : ranks) out.push_back(idx.pts[idx.lex_order[rk]]);
    return out;
}

// Points that determine the convex hull of a region of the sample, in
// lexicographic order: for planar samples, k-d nodes inside the region
// contribute only their cached hull vertices. `count` is the number of
// sample points in the region.
struct HullInput {
    std::vector<Point> pts;
    std::size_t count = 0;
};

template <class Classify, class Inside>
HullInput gather_hull_input(const TaggedSample& s, Classify&& classify, Inside&& inside) {
    const auto& idx = *s.index;
    HullInput out;
    std::vector<std::uint32_t> ranks;
    const bool cached = !idx.node_hull.empty();
    idx.tree.visit_region(
        classify, inside,
        [&](std::int32_t id) {
            out.count += static_cast<std::size_t>(idx.tree.node_end(id) - idx.tree.node_begin(id));
            if (cached) {
                for (auto i : idx.node_hull[static_cast<std::size_t>(id)]) ranks.push_back(idx.lex_rank[i]);
            } else {
                for (auto it = idx.tree.node_begin(id); it != idx.tree.node_end(id); ++it) ranks.push_back(idx.lex_rank[*it]);
            }
        },
        [&](std::uint32_t i) {
            ++out.count;
            ranks.push_back(idx.lex_rank[i]);
        });
    std::sort(ranks.begin(), ranks.end());
    out.pts.reserve(ranks.size());
    for (auto rk : ranks) out.pts.push_back(idx.pts[idx.lex_order[rk]]);
    return out;
}

inline int classify_ball(const Point& lo, const Point& hi, const Point& c, double r2) {
    if (KdTree::min_d2(lo, hi, c) > r2) return 0;
    return KdTree::max_d2(lo, hi, c) <= r2 ? 2 : 1;
}

inline HullInput gather_ball_hull(const TaggedSample& s, const Point& x, double r, const Ball* within = nullptr) {
    const double r2 = r * r * (1.0 + 1e-12);
    const double w2 = within ? within->radius * within->radius * (1.0 + 1e-12) : 0.0;
    return gather_hull_input(
        s,
        [&](const Point& lo, const Point& hi) {
            const int a = classify_ball(lo, hi, x, r2);
            if (a == 0 || within == nullptr) return a;
            return std::min(a, classify_ball(lo, hi, within->center, w2));
        },
        [&](const Point& p) { return dist2(p, x) <= r2 && (within == nullptr || dist2(p, within->center) <= w2); });
}

inline HullInput gather_box_hull(const TaggedSample& s, const Point& lo, const Point& hi) {
    return gather_hull_input(
        s,
        [&](const Point& a, const Point& b) {
            for (int k = 0; k < kMaxDim; ++k)
                if (b[k] < lo[k] || a[k] > hi[k]) return 0;
            for (int k = 0; k < kMaxDim; ++k)
                if (a[k] < lo[k] || b[k] > hi[k]) return 1;
            return 2;
        },
        [&](const Point& p) {
            for (int k = 0; k < kMaxDim; ++k)
                if (p[k] < lo[k] || p[k] > hi[k]) return false;
            return true;
        });
}

inline BetaResult width_result(const HullInput& in, int dim, double norm_len) {
    BetaResult res;
    res.count = in.count;
    if (in.pts.empty()) {
        res.empty = true;
        return res;
    }
    double w = 0.0;
    if (dim == 2) {
        res.fit = min_width_strip_of_hull(convex_hull_sorted(in.pts));
        w = res.fit.width;
    } else {
        w = principal_axis_width(in.pts);
        res.fit.width = w;
        res.approximate = true;
    }
    res.beta = w / (2.0 * norm_len);
    return res;
}

}  // namespace detail

// Width of the best strip through sample n B(x, r), divided by 2r. The
// optional `within` ball restricts the sample first (used for K n B).
inline BetaResult beta_ball_ex(const TaggedSample& s, const Point& x, double r, const GeometryOptions& opt = {},
                               const Ball* within = nullptr) {
    detail::check_scale(s, r, opt);
    auto res = detail::width_result(detail::gather_ball_hull(s, x, r, within), s.ambient_dim, r);
    res.beta = std::min(res.beta, 1.0);
    return res;
}

inline double beta_ball(const TaggedSample& s, const Point& x, double r, const GeometryOptions& opt = {}) {
    return beta_ball_ex(s, x, r, opt).beta;
}

// Width of sample n 3Q divided by 2|Q|.
inline BetaResult beta_square_ex(const TaggedSample& s, const DyadicSquare& q, const GeometryOptions& opt = {}) {
    require(s.planar(), "dyadic squares need a planar sample");
    const double side = q.side();
    detail::check_scale(s, side, opt);
    const Point c = q.center();
    const Point lo{c[0] - 1.5 * side, c[1] - 1.5 * side};
    const Point hi{c[0] + 1.5 * side, c[1] + 1.5 * side};
    auto res = detail::width_result(detail::gather_box_hull(s, lo, hi), 2, side);
    res.beta = std::min(res.beta, 3.0);
    return res;
}

inline double beta_square(const TaggedSample& s, const DyadicSquare& q, const GeometryOptions& opt = {}) {
    return beta_square_ex(s, q, opt).beta;
}

// Diameter of the convex hull of sample n B(x, r).
inline double hull_diameter(const TaggedSample& s, const Point& x, double r, const GeometryOptions& opt = {}) {
    detail::check_scale(s, r, opt);
    const auto pts = s.planar() ? detail::gather_ball_hull(s, x, r).pts : detail::gather_ball(s, x, r);
    if (pts.size() <= 1) return 0.0;
    double d = 0.0;
    if (s.planar()) {
        d = hull_diameter_of_hull(convex_hull_sorted(pts));
    } else {
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, dist2(pts[i], pts[j]));
        d = std::sqrt(d);
    }
    return std::min(d, 2.0 * r);
}

struct PorosityResult {
    bool porous = false;
    Point witness;
    std::size_t evaluations = 0;
};

// Searches for z with B(z, eps r) inside B(x, r) and no sample point in the
// closed ball B(z, eps r - h). The search starts from the bounding cube of
// admissible centers and refines cells (pitch below eps r / 4 and down to
// h / 8); a cell is discarded only when the 1-Lipschitz bounds show it
// cannot contain a valid center.
inline PorosityResult porosity_probe(const TaggedSample& s, const Point& x, double r, double eps) {
    require(eps > 0.0 && eps < 0.5, "porosity eps must lie in (0, 1/2)");
    const double h = s.resolution;
    if (!(r > 0.0) || eps * r < 2.0 * h * (1.0 - 1e-12)) throw ResolutionError("porosity scale below resolution");

    const int dim = s.ambient_dim;
    const double reach = r - eps * r;    // admissible centers: |z - x| <= reach
    const double clear = eps * r - h;    // needed clearance to the sample
    const double min_delta = h / 8.0;
    const double sqrt_dim = std::sqrt(static_cast<double>(dim));
    const std::size_t max_evals = 4000000;

    struct Cell {
        double bound;
        std::uint64_t seq;
        Point c;
        double half;
        bool operator<(const Cell& o) const { return bound < o.bound || (bound == o.bound && seq > o.seq); }
    };

    PorosityResult out;
    std::priority_queue<Cell> queue;
    std::uint64_t seq = 0;
    auto consider = [&](const Point& c, double half) -> bool {
        ++out.evaluations;
        const double delta = half * sqrt_dim;
        const double g1 = reach - dist(c, x);
        const double dn = s.tree().nearest_dist(c, clear + delta + h);
        const double g2 = dn - clear;
        if (g1 >= 0.0 && g2 > 0.0) {
            out.porous = true;
            out.witness = c;
            return true;
        }
        if (g1 + delta < 0.0 || g2 + delta <= 0.0) return false;
        if (delta <= min_delta) return false;
        queue.push(Cell{std::min(g1, g2) + delta, seq++, c, half});
        return false;
    };

    if (consider(x, reach)) return out;
    while (!queue.empty() && out.evaluations < max_evals) {
        const Cell cell = queue.top();
        queue.pop();
        const double q = 0.5 * cell.half;
        const int children = 1 << dim;
        for (int m = 0; m < children; ++m) {
            Point c = cell.c;
            for (int a = 0; a < dim; ++a) c[static_cast<std::size_t>(a)] += ((m >> a) & 1) ? q : -q;
            if (consider(c, q)) return out;
        }
    }
    return out;
}

}  // namespace wiggly
