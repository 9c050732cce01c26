#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "error.hpp"
#include "hull.hpp"
#include "kdtree.hpp"
#include "point.hpp"

namespace wiggly {

enum class Tag : std::uint8_t { W = 0, E = 1 };

inline const char* tag_name(Tag t) { return t == Tag::W ? "W" : "E"; }

// Immutable acceleration data derived from a sample's points.
struct SampleIndex {
    std::vector<Point> pts;
    KdTree tree;
    std::vector<std::uint32_t> lex_order;  // indices sorted lexicographically
    std::vector<std::uint32_t> lex_rank;   // inverse of lex_order
    std::vector<double> spacing;           // local spacing weight per point
    // planar samples: convex-hull vertex ids of every k-d tree node, sorted
    // by lex rank
    std::vector<std::vector<std::uint32_t>> node_hull;
};

namespace detail {

// Monotone chain over ids sorted by lex rank; returns the hull vertex ids
// sorted by lex rank.
inline std::vector<std::uint32_t> hull_vertex_ids(const std::vector<Point>& pts, const std::vector<std::uint32_t>& ids,
                                                  const std::vector<std::uint32_t>& rank) {
    std::vector<std::uint32_t> uniq;
    uniq.reserve(ids.size());
    for (auto i : ids)
        if (uniq.empty() || !(pts[uniq.back()][0] == pts[i][0] && pts[uniq.back()][1] == pts[i][1])) uniq.push_back(i);
    if (uniq.size() <= 2) return uniq;
    auto cross = [&](std::uint32_t o, std::uint32_t a, std::uint32_t b) {
        return (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1]) - (pts[a][1] - pts[o][1]) * (pts[b][0] - pts[o][0]);
    };
    std::vector<std::uint32_t> h(2 * uniq.size());
    std::size_t k = 0;
    for (auto p : uniq) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0.0) --k;
        h[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = uniq.size() - 1; i-- > 0;) {
        const auto p = uniq[i];
        while (k >= lower && cross(h[k - 2], h[k - 1], p) <= 0.0) --k;
        h[k++] = p;
    }
    h.resize(k - 1);
    std::sort(h.begin(), h.end(), [&](std::uint32_t a, std::uint32_t b) { return rank[a] < rank[b]; });
    h.erase(std::unique(h.begin(), h.end()), h.end());
    return h;
}

inline void build_node_hulls(SampleIndex& idx) {
    const std::size_t m = idx.tree.node_count();
    idx.node_hull.assign(m, {});
    auto by_rank = [&](std::uint32_t a, std::uint32_t b) { return idx.lex_rank[a] < idx.lex_rank[b]; };
    // children have larger ids than their parent
    for (std::size_t k = m; k-- > 0;) {
        const auto id = static_cast<std::int32_t>(k);
        std::vector<std::uint32_t> ids;
        if (idx.tree.node_left(id) < 0) {
            ids.assign(idx.tree.node_begin(id), idx.tree.node_end(id));
            std::sort(ids.begin(), ids.end(), by_rank);
        } else {
            const auto& a = idx.node_hull[static_cast<std::size_t>(idx.tree.node_left(id))];
            const auto& b = idx.node_hull[static_cast<std::size_t>(idx.tree.node_right(id))];
            ids.resize(a.size() + b.size());
            std::merge(a.begin(), a.end(), b.begin(), b.end(), ids.begin(), by_rank);
        }
        idx.node_hull[k] = hull_vertex_ids(idx.pts, ids, idx.lex_rank);
    }
}

}  // namespace detail

// Finite sample of K = W u E. Call finalize() after filling the vectors;
// copies share the immutable index.
struct TaggedSample {
    std::vector<Point> points;
    std::vector<Tag> tags;
    std::vector<double> e_weight;
    double resolution = 0.0;
    int ambient_dim = 2;
    double diameter = 0.0;
    std::shared_ptr<const SampleIndex> index;

    std::size_t size() const { return points.size(); }
    bool planar() const { return ambient_dim == 2; }

    const KdTree& tree() const { return index->tree; }

    // Validates invariants, computes the diameter and builds the index.
    void finalize() {
        const std::size_t n = points.size();
        require(n >= 2, "sample needs at least 2 points");
        require(tags.size() == n && e_weight.size() == n, "sample arrays have inconsistent lengths");
        require(resolution > 0.0 && std::isfinite(resolution), "resolution must be positive");
        require(ambient_dim >= 2 && ambient_dim <= kMaxDim, "ambient dimension must be 2 or 3");
        for (std::size_t i = 0; i < n; ++i) {
            require(is_finite(points[i]), "non-finite coordinate at record " + std::to_string(i));
            for (int a = ambient_dim; a < kMaxDim; ++a)
                require(points[i][static_cast<std::size_t>(a)] == 0.0, "coordinate beyond ambient dimension");
            require(std::isfinite(e_weight[i]) && e_weight[i] >= 0.0, "e_weight must be nonnegative");
            if (tags[i] == Tag::W) require(e_weight[i] == 0.0, "W-tagged point with nonzero e_weight");
            else require(e_weight[i] > 0.0, "E-tagged point with zero e_weight");
        }
        auto idx = std::make_shared<SampleIndex>();
        idx->pts = points;
        idx->tree.build(idx->pts, ambient_dim);
        idx->lex_order.resize(n);
        std::iota(idx->lex_order.begin(), idx->lex_order.end(), 0u);
        std::sort(idx->lex_order.begin(), idx->lex_order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return points[a].c < points[b].c || (points[a].c == points[b].c && a < b);
        });
        idx->lex_rank.resize(n);
        for (std::uint32_t r = 0; r < n; ++r) idx->lex_rank[idx->lex_order[r]] = r;
        if (ambient_dim == 2) detail::build_node_hulls(*idx);
        idx->spacing.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto d = idx->tree.knn_dists(points[i], 2, static_cast<long long>(i));
            double s = 0.0;
            for (double v : d) s += v;
            if (d.size() == 1) s *= 2.0;
            idx->spacing[i] = 0.5 * std::min(s, 4.0 * resolution);
        }
        diameter = compute_diameter(idx->pts, idx->lex_order);
        index = std::move(idx);
    }

    // Indices of sample points in the closed ball, in lexicographic order.
    std::vector<std::uint32_t> ball_indices(const Point& c, double r) const {
        std::vector<std::uint32_t> ranks;
        index->tree.for_each_in_ball(c, r, [&](std::uint32_t i) { ranks.push_back(index->lex_rank[i]); });
        std::sort(ranks.begin(), ranks.end());
        for (auto& v : ranks) v = index->lex_order[v];
        return ranks;
    }

    double spacing_weight(std::size_t i) const { return index->spacing[i]; }

    double total_e_weight() const {
        double s = 0.0;
        for (double w : e_weight) s += w;
        return s;
    }

private:
    double compute_diameter(const std::vector<Point>& pts, const std::vector<std::uint32_t>& order) const {
        if (ambient_dim == 2) {
            std::vector<Point> sorted;
            sorted.reserve(pts.size());
            for (auto i : order) sorted.push_back(pts[i]);
            return hull_diameter_of_hull(convex_hull_sorted(sorted));
        }
        double best = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, dist2(pts[i], pts[j]));
        return std::sqrt(best);
    }
};

inline TaggedSample make_sample(std::vector<Point> pts, double resolution, int dim = 2) {
    TaggedSample s;
    const std::size_t n = pts.size();
    s.points = std::move(pts);
    s.tags.assign(n, Tag::W);
    s.e_weight.assign(n, 0.0);
    s.resolution = resolution;
    s.ambient_dim = dim;
    s.finalize();
    return s;
}

}  // namespace wiggly
