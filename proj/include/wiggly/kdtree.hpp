#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "point.hpp"

namespace wiggly {

// Static k-d tree over a point array. Queries are read-only and thread-safe.
class KdTree {
public:
    KdTree() = default;

    KdTree(const std::vector<Point>& pts, int dim, std::size_t leaf_size = 16) { build(pts, dim, leaf_size); }

    void build(const std::vector<Point>& pts, int dim, std::size_t leaf_size = 16) {
        pts_ = &pts;
        dim_ = dim;
        leaf_ = std::max<std::size_t>(leaf_size, 1);
        idx_.resize(pts.size());
        std::iota(idx_.begin(), idx_.end(), 0u);
        nodes_.clear();
        if (!pts.empty()) build_node(0, idx_.size());
    }

    std::size_t size() const { return idx_.size(); }

    // Calls f(i) for every point index i in the closed ball B(c, r).
    template <class F>
    void for_each_in_ball(const Point& c, double r, F&& f) const {
        if (nodes_.empty()) return;
        const double r2 = r * r * (1.0 + 1e-12);
        visit_ball(0, c, r2, f);
    }

    std::vector<std::uint32_t> ball(const Point& c, double r) const {
        std::vector<std::uint32_t> out;
        for_each_in_ball(c, r, [&](std::uint32_t i) { out.push_back(i); });
        std::sort(out.begin(), out.end());
        return out;
    }

    std::size_t count_in_ball(const Point& c, double r) const {
        std::size_t n = 0;
        for_each_in_ball(c, r, [&](std::uint32_t) { ++n; });
        return n;
    }

    // Calls f(i) for every point with lo <= p <= hi coordinatewise.
    template <class F>
    void for_each_in_box(const Point& lo, const Point& hi, F&& f) const {
        if (nodes_.empty()) return;
        visit_box(0, lo, hi, f);
    }

    // Distance to the nearest point, or `cap` if no point is closer than cap.
    double nearest_dist(const Point& q, double cap = INFINITY) const {
        if (nodes_.empty()) return cap;
        double best2 = cap * cap;
        visit_nearest(0, q, best2);
        return std::min(cap, std::sqrt(best2));
    }

    // Index of the nearest point other than `self` (or -1 if none).
    long long nearest_index(const Point& q, long long self = -1) const {
        if (nodes_.empty()) return -1;
        double best2 = INFINITY;
        long long best = -1;
        visit_nearest_idx(0, q, self, best2, best);
        return best;
    }

    // The k smallest distances from q to points other than `self`, ascending.
    std::vector<double> knn_dists(const Point& q, std::size_t k, long long self = -1) const {
        std::vector<double> heap;  // max-heap of squared distances
        if (!nodes_.empty() && k > 0) visit_knn(0, q, self, k, heap);
        std::sort_heap(heap.begin(), heap.end());
        for (auto& d : heap) d = std::sqrt(d);
        return heap;
    }

    // Node-level access for callers that cache per-node data.
    std::size_t node_count() const { return nodes_.size(); }
    std::int32_t node_left(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)].left; }
    std::int32_t node_right(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)].right; }
    const std::uint32_t* node_begin(std::int32_t id) const { return idx_.data() + nodes_[static_cast<std::size_t>(id)].begin; }
    const std::uint32_t* node_end(std::int32_t id) const { return idx_.data() + nodes_[static_cast<std::size_t>(id)].end; }

    static double min_d2(const Point& lo, const Point& hi, const Point& q) {
        double s = 0.0;
        for (int a = 0; a < kMaxDim; ++a) {
            double d = 0.0;
            if (q[a] < lo[a]) d = lo[a] - q[a];
            else if (q[a] > hi[a]) d = q[a] - hi[a];
            s += d * d;
        }
        return s;
    }

    static double max_d2(const Point& lo, const Point& hi, const Point& q) {
        double s = 0.0;
        for (int a = 0; a < kMaxDim; ++a) {
            const double d = std::max(std::abs(q[a] - lo[a]), std::abs(q[a] - hi[a]));
            s += d * d;
        }
        return s;
    }

    // Region query that reports whole nodes. classify(lo, hi) returns 0 when
    // the box misses the region, 2 when it lies inside, 1 otherwise; inside(p)
    // decides single points of partially covered leaves.
    template <class Classify, class Inside, class OnNode, class OnPoint>
    void visit_region(Classify&& classify, Inside&& inside, OnNode&& on_node, OnPoint&& on_point) const {
        if (!nodes_.empty()) region(0, classify, inside, on_node, on_point);
    }

private:
    struct Node {
        Point lo, hi;
        std::uint32_t begin = 0, end = 0;
        std::int32_t left = -1, right = -1;
    };

    const std::vector<Point>* pts_ = nullptr;
    int dim_ = 2;
    std::size_t leaf_ = 16;
    std::vector<std::uint32_t> idx_;
    std::vector<Node> nodes_;

    const Point& P(std::uint32_t i) const { return (*pts_)[i]; }

    std::int32_t build_node(std::size_t b, std::size_t e) {
        Node nd;
        nd.begin = static_cast<std::uint32_t>(b);
        nd.end = static_cast<std::uint32_t>(e);
        nd.lo = nd.hi = P(idx_[b]);
        for (std::size_t i = b; i < e; ++i) {
            const Point& p = P(idx_[i]);
            for (int a = 0; a < kMaxDim; ++a) {
                nd.lo[a] = std::min(nd.lo[a], p[a]);
                nd.hi[a] = std::max(nd.hi[a], p[a]);
            }
        }
        const auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(nd);
        if (e - b > leaf_) {
            int axis = 0;
            double spread = -1.0;
            for (int a = 0; a < dim_; ++a) {
                const double s = nd.hi[a] - nd.lo[a];
                if (s > spread) {
                    spread = s;
                    axis = a;
                }
            }
            if (spread > 0.0) {
                const std::size_t mid = b + (e - b) / 2;
                std::nth_element(idx_.begin() + static_cast<std::ptrdiff_t>(b),
                                 idx_.begin() + static_cast<std::ptrdiff_t>(mid),
                                 idx_.begin() + static_cast<std::ptrdiff_t>(e),
                                 [&](std::uint32_t u, std::uint32_t v) {
                                     const double pu = P(u)[axis], pv = P(v)[axis];
                                     return pu < pv || (pu == pv && u < v);
                                 });
                const auto l = build_node(b, mid);
                const auto r = build_node(mid, e);
                nodes_[id].left = l;
                nodes_[id].right = r;
            }
        }
        return id;
    }

    static double box_min_d2(const Node& n, const Point& q) {
        double s = 0.0;
        for (int a = 0; a < kMaxDim; ++a) {
            double d = 0.0;
            if (q[a] < n.lo[a]) d = n.lo[a] - q[a];
            else if (q[a] > n.hi[a]) d = q[a] - n.hi[a];
            s += d * d;
        }
        return s;
    }

    static double box_max_d2(const Node& n, const Point& q) {
        double s = 0.0;
        for (int a = 0; a < kMaxDim; ++a) {
            const double d = std::max(std::abs(q[a] - n.lo[a]), std::abs(q[a] - n.hi[a]));
            s += d * d;
        }
        return s;
    }

    template <class Classify, class Inside, class OnNode, class OnPoint>
    void region(std::int32_t id, Classify& classify, Inside& inside, OnNode& on_node, OnPoint& on_point) const {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        const int cls = classify(n.lo, n.hi);
        if (cls == 0) return;
        if (cls == 2) {
            on_node(id);
            return;
        }
        if (n.left < 0) {
            for (std::uint32_t i = n.begin; i < n.end; ++i)
                if (inside(P(idx_[i]))) on_point(idx_[i]);
            return;
        }
        region(n.left, classify, inside, on_node, on_point);
        region(n.right, classify, inside, on_node, on_point);
    }

    template <class F>
    void visit_ball(std::int32_t id, const Point& c, double r2, F& f) const {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        if (box_min_d2(n, c) > r2) return;
        if (box_max_d2(n, c) <= r2) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) f(idx_[i]);
            return;
        }
        if (n.left < 0) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) {
                if (dist2(P(idx_[i]), c) <= r2) f(idx_[i]);
            }
            return;
        }
        visit_ball(n.left, c, r2, f);
        visit_ball(n.right, c, r2, f);
    }

    template <class F>
    void visit_box(std::int32_t id, const Point& lo, const Point& hi, F& f) const {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        for (int a = 0; a < kMaxDim; ++a) {
            if (n.hi[a] < lo[a] || n.lo[a] > hi[a]) return;
        }
        if (n.left < 0) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) {
                const Point& p = P(idx_[i]);
                bool in = true;
                for (int a = 0; a < kMaxDim && in; ++a) in = p[a] >= lo[a] && p[a] <= hi[a];
                if (in) f(idx_[i]);
            }
            return;
        }
        visit_box(n.left, lo, hi, f);
        visit_box(n.right, lo, hi, f);
    }

    void visit_nearest(std::int32_t id, const Point& q, double& best2) const {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        if (box_min_d2(n, q) >= best2) return;
        if (n.left < 0) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) best2 = std::min(best2, dist2(P(idx_[i]), q));
            return;
        }
        const double dl = box_min_d2(nodes_[static_cast<std::size_t>(n.left)], q);
        const double dr = box_min_d2(nodes_[static_cast<std::size_t>(n.right)], q);
        if (dl <= dr) {
            visit_nearest(n.left, q, best2);
            visit_nearest(n.right, q, best2);
        } else {
            visit_nearest(n.right, q, best2);
            visit_nearest(n.left, q, best2);
        }
    }

    void visit_nearest_idx(std::int32_t id, const Point& q, long long self, double& best2, long long& best) const {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        if (box_min_d2(n, q) > best2) return;
        if (n.left < 0) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) {
                const long long j = idx_[i];
                if (j == self) continue;
                const double d = dist2(P(idx_[i]), q);
                if (d < best2 || (d == best2 && j < best)) {
                    best2 = d;
                    best = j;
                }
            }
            return;
        }
        visit_nearest_idx(n.left, q, self, best2, best);
        visit_nearest_idx(n.right, q, self, best2, best);
    }

    void visit_knn(std::int32_t id, const Point& q, long long self, std::size_t k, std::vector<double>& heap) const {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        if (heap.size() == k && box_min_d2(n, q) >= heap.front()) return;
        if (n.left < 0) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) {
                if (static_cast<long long>(idx_[i]) == self) continue;
                const double d = dist2(P(idx_[i]), q);
                if (heap.size() < k) {
                    heap.push_back(d);
                    std::push_heap(heap.begin(), heap.end());
                } else if (d < heap.front()) {
                    std::pop_heap(heap.begin(), heap.end());
                    heap.back() = d;
                    std::push_heap(heap.begin(), heap.end());
                }
            }
            return;
        }
        const double dl = box_min_d2(nodes_[static_cast<std::size_t>(n.left)], q);
        const double dr = box_min_d2(nodes_[static_cast<std::size_t>(n.right)], q);
        if (dl <= dr) {
            visit_knn(n.left, q, self, k, heap);
            visit_knn(n.right, q, self, k, heap);
        } else {
            visit_knn(n.right, q, self, k, heap);
            visit_knn(n.left, q, self, k, heap);
        }
    }
};

}  // namespace wiggly
