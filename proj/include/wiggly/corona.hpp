#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "core_geometry.hpp"
#include "error.hpp"
#include "hull.hpp"
#include "kdtree.hpp"
#include "parallel.hpp"
#include "sample.hpp"

namespace wiggly {

enum class Variant { avoiding, universal };
enum class NodeKind { internal, good, bad, terminal };

inline const char* variant_name(Variant v) { return v == Variant::avoiding ? "avoiding" : "universal"; }

inline const char* kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::internal: return "internal";
        case NodeKind::good: return "good";
        case NodeKind::bad: return "bad";
        case NodeKind::terminal: return "terminal";
    }
    return "?";
}

struct CoronaOptions {
    Variant variant = Variant::universal;
    double M = 4.0 * std::log(10.0);
    double eps = 0.01;
    int n_max = 6;
    double lambda = 0.5;
    double good_fraction = 0.01;  // good ball: discrete length of Z(B) >= good_fraction * R_B
    GeometryOptions geom;
    std::optional<Ball> seed_ball;
};

struct StoppingScale {
    Point x;
    double t = 0.0;
    double M = 0.0;
    double integral = 0.0;  // accumulated integral over [max(t, window floor), R_B]
    int scales = 0;         // beta evaluations used
};

namespace detail {

// Evaluates the stopping scale of x inside B. beta is piecewise constant on
// the annuli [R lambda^(i+1), R lambda^i], taking its value at the outer
// radius, so the integral is continuous in t and t can be solved exactly in
// the annulus where the budget runs out.
inline StoppingScale stopping_scale_impl(const TaggedSample& s, const Ball& B, const Point& x, double M, double lambda,
                                         const GeometryOptions& geom, double width_all) {
    StoppingScale st;
    st.x = x;
    st.M = M;
    const double floor_r = geom.resolution_guard * s.resolution * (1.0 - 1e-12);
    const double step = std::log(1.0 / lambda);
    const double offset = dist(x, B.center);
    double I = 0.0;
    double r = B.radius;
    for (int i = 0; r >= floor_r; ++i, r *= lambda) {
        double beta;
        if (offset + B.radius <= r) beta = std::min(1.0, width_all / (2.0 * r));
        else beta = beta_ball_ex(s, x, r, geom, &B).beta;
        ++st.scales;
        const double add = step * beta * beta;
        if (I + add > M) {
            st.t = r * std::exp(-(M - I) / (beta * beta));
            st.integral = M;
            return st;
        }
        I += add;
    }
    st.t = 0.0;
    st.integral = I;
    return st;
}

inline double sample_width(const TaggedSample& s, const std::vector<std::uint32_t>& lex_sorted_idx) {
    std::vector<Point> pts;
    pts.reserve(lex_sorted_idx.size());
    for (auto i : lex_sorted_idx) pts.push_back(s.points[i]);
    if (pts.empty()) return 0.0;
    if (s.planar()) return min_width_strip_of_hull(convex_hull_sorted(pts)).width;
    return principal_axis_width(pts);
}

}  // namespace detail

// Smallest t in (0, R_B) with integral_t^R_B beta_{K_B}^2 dt/t <= M, or 0
// when the integral over the resolved window stays within M.
inline StoppingScale stopping_scale(const TaggedSample& s, const Ball& B, const Point& x, double M,
                                    double lambda = 0.5, const GeometryOptions& geom = {}) {
    require(M > 0.0, "M must be positive");
    require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
    const auto kb = s.ball_indices(B.center, B.radius);
    if (kb.empty()) throw DataError("empty ball");
    return detail::stopping_scale_impl(s, B, x, M, lambda, geom, detail::sample_width(s, kb));
}

struct Split {
    std::vector<std::uint32_t> kb;  // K_B indices, lexicographic
    std::vector<double> t;          // stopping scale per K_B entry
    std::vector<std::uint32_t> z;   // t == 0
    std::vector<std::uint32_t> w;   // t > 0
    double z_length = 0.0;          // discrete length of Z(B) (spacing weights)
    double z_e_weight = 0.0;
    int scales = 0;                 // resolved scales at the ball's own radius
};

inline Split wiggly_split(const TaggedSample& s, const Ball& B, double M, double lambda = 0.5,
                          const GeometryOptions& geom = {}) {
    require(M > 0.0, "M must be positive");
    Split out;
    out.kb = s.ball_indices(B.center, B.radius);
    if (out.kb.empty()) throw DataError("empty ball");
    const double width_all = detail::sample_width(s, out.kb);
    out.t.assign(out.kb.size(), 0.0);
    parallel_for(out.kb.size(), [&](std::size_t i) {
        out.t[i] = detail::stopping_scale_impl(s, B, s.points[out.kb[i]], M, lambda, geom, width_all).t;
    });
    for (std::size_t i = 0; i < out.kb.size(); ++i) {
        const auto p = out.kb[i];
        if (out.t[i] == 0.0) {
            out.z.push_back(p);
            out.z_length += s.spacing_weight(p);
            out.z_e_weight += s.e_weight[p];
        } else {
            out.w.push_back(p);
        }
    }
    const double floor_r = geom.resolution_guard * s.resolution * (1.0 - 1e-12);
    for (double r = B.radius; r >= floor_r; r *= lambda) ++out.scales;
    return out;
}

// Greedy net: decreasing t, ties by coordinates; x is kept when the open disk
// D(x, 2 t_x) misses every kept D(y, 2 t_y). Returns positions into `pts`.
inline std::vector<std::size_t> select_net(const std::vector<Point>& pts, const std::vector<double>& t) {
    require(pts.size() == t.size(), "select_net: size mismatch");
    for (double v : t) require(v > 0.0, "select_net needs positive stopping scales");
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (t[a] != t[b]) return t[a] > t[b];
        if (pts[a].c != pts[b].c) return pts[a].c < pts[b].c;
        return a < b;
    });

    // Kept balls bucketed by floor(log2 t); a conflict with a kept y needs
    // |x - y| < 2 (t_x + t_y) <= 4 t_y < 2^(k+3), the cell size of bucket k.
    struct Key {
        long long a, b, c;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::uint64_t h = static_cast<std::uint64_t>(k.a) * 0x9E3779B97F4A7C15ull;
            h ^= static_cast<std::uint64_t>(k.b) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
            h ^= static_cast<std::uint64_t>(k.c) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
            return static_cast<std::size_t>(h);
        }
    };
    struct Bucket {
        double cell;
        std::unordered_map<Key, std::vector<std::size_t>, KeyHash> grid;
    };
    std::vector<std::pair<int, Bucket>> buckets;
    auto cell_of = [](const Point& p, double cell) {
        return Key{static_cast<long long>(std::floor(p[0] / cell)), static_cast<long long>(std::floor(p[1] / cell)),
                   static_cast<long long>(std::floor(p[2] / cell))};
    };
    std::vector<std::size_t> kept;
    for (std::size_t i : order) {
        const Point& x = pts[i];
        bool clash = false;
        for (auto& [k, bucket] : buckets) {
            const Key c = cell_of(x, bucket.cell);
            for (long long da = -1; da <= 1 && !clash; ++da)
                for (long long db = -1; db <= 1 && !clash; ++db)
                    for (long long dc = -1; dc <= 1 && !clash; ++dc) {
                        auto it = bucket.grid.find(Key{c.a + da, c.b + db, c.c + dc});
                        if (it == bucket.grid.end()) continue;
                        for (std::size_t j : it->second)
                            if (dist(x, pts[j]) < 2.0 * (t[i] + t[j])) {
                                clash = true;
                                break;
                            }
                    }
            if (clash) break;
        }
        if (clash) continue;
        kept.push_back(i);
        const int k = static_cast<int>(std::floor(std::log2(t[i])));
        auto it = std::find_if(buckets.begin(), buckets.end(), [&](const auto& b) { return b.first == k; });
        if (it == buckets.end()) {
            buckets.push_back({k, Bucket{std::ldexp(1.0, k + 3), {}}});
            it = std::prev(buckets.end());
        }
        it->second.grid[cell_of(x, it->second.cell)].push_back(i);
    }
    return kept;
}

struct FilterResult {
    std::vector<std::size_t> kept;  // positions into the candidate list
    double sum_t = 0.0;
    bool pass = false;      // sum_t >= 10 R_B
    bool pass_23 = false;   // sum_t >= 23 R_B (diagnostic)
    double e_total = 0.0;   // E-mass summed over kept balls
    bool e_total_pass = false;  // e_total <= (eps/2) R_B
};

// E-mass of the closed ball, from the e_weights of the whole sample.
inline double e_mass(const TaggedSample& s, const Point& c, double r) {
    double m = 0.0;
    s.tree().for_each_in_ball(c, r, [&](std::uint32_t i) { m += s.e_weight[i]; });
    return m;
}

// Keeps candidates whose ball carries E-mass below (eps/2) t.
inline FilterResult filter_net(const TaggedSample& s, const std::vector<Point>& centers, const std::vector<double>& t,
                               double eps, double R_B) {
    require(eps > 0.0 && eps <= 0.01 + 1e-15, "eps must lie in (0, 1/100]");
    require(centers.size() == t.size(), "filter_net: size mismatch");
    std::vector<double> mass(centers.size(), 0.0);
    parallel_for(centers.size(), [&](std::size_t i) { mass[i] = e_mass(s, centers[i], t[i]); });
    FilterResult f;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (mass[i] < 0.5 * eps * t[i]) {
            f.kept.push_back(i);
            f.sum_t += t[i];
            f.e_total += mass[i];
        }
    }
    f.pass = f.sum_t >= 10.0 * R_B;
    f.pass_23 = f.sum_t >= 23.0 * R_B;
    f.e_total_pass = f.e_total <= 0.5 * eps * R_B;
    return f;
}

// Child mass fractions proportional to the stopping scales.
inline std::vector<double> local_measure(const std::vector<double>& t) {
    if (t.empty()) throw InternalError("measure construction stuck");
    double sum = 0.0;
    for (double v : t) sum += v;
    std::vector<double> w;
    w.reserve(t.size());
    for (double v : t) w.push_back(v / sum);
    return w;
}

struct CoronaNode {
    Ball ball;
    int level = 0;
    int parent = -1;
    NodeKind kind = NodeKind::internal;
    std::vector<int> children;
    double mass = 0.0;
    std::size_t kb_count = 0;
    std::size_t z_count = 0;
    double z_length = 0.0;
    double z_e_weight = 0.0;
    std::size_t net_size = 0;  // candidates before filtering
    double sum_t = 0.0;
    bool pass10 = false;
    bool pass23 = false;
    double e_total = 0.0;
};

struct Atom {
    std::uint32_t point = 0;
    double mass = 0.0;
    int leaf = -1;
};

struct AtomIndex {
    std::vector<Point> pts;
    std::vector<double> mass;
    KdTree tree;
};

struct CoronaMeasure {
    CoronaOptions options;
    Ball seed;
    std::vector<CoronaNode> nodes;  // breadth-first; nodes[0] is the root
    std::vector<Atom> atoms;
    int depth = 0;
    std::shared_ptr<const AtomIndex> index;

    double total_mass() const {
        double m = 0.0;
        for (const auto& a : atoms) m += a.mass;
        return m;
    }

    double atom_e_weight(const TaggedSample& s) const {
        double w = 0.0;
        for (const auto& a : atoms) w += s.e_weight[a.point];
        return w;
    }
};

// mu of the closed ball B(x, r).
inline double measure_query(const CoronaMeasure& mu, const Point& x, double r) {
    double m = 0.0;
    mu.index->tree.for_each_in_ball(x, r, [&](std::uint32_t i) { m += mu.index->mass[i]; });
    return m;
}

namespace detail {

inline std::string stuck_message(const CoronaNode& n, const std::string& why) {
    std::ostringstream os;
    os.precision(6);
    os << "measure construction stuck: " << why << " (level " << n.level << ", center (" << n.ball.center[0] << ", "
       << n.ball.center[1] << "), radius " << n.ball.radius << ", |K_B| = " << n.kb_count << ")";
    return os.str();
}

inline void finish_index(CoronaMeasure& mu, const TaggedSample& s) {
    std::vector<std::uint32_t> order(mu.atoms.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return mu.atoms[a].point < mu.atoms[b].point || (mu.atoms[a].point == mu.atoms[b].point && a < b);
    });
    auto idx = std::make_shared<AtomIndex>();
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& a = mu.atoms[order[k]];
        if (k > 0 && mu.atoms[order[k - 1]].point == a.point) idx->mass.back() += a.mass;
        else {
            idx->pts.push_back(s.points[a.point]);
            idx->mass.push_back(a.mass);
        }
    }
    idx->tree.build(idx->pts, s.ambient_dim);
    mu.index = std::move(idx);
}

}  // namespace detail

// Seed for the avoiding variant: the first point (lexicographic order) at
// the largest radius diam 2^-k whose ball has E-mass below eps * R.
inline std::optional<Ball> find_seed_ball(const TaggedSample& s, double eps, const GeometryOptions& geom = {}) {
    const auto& order = s.index->lex_order;
    for (int k = 1;; ++k) {
        const double R = std::ldexp(s.diameter, -k);
        if (R < 4.0 * geom.resolution_guard * s.resolution) return std::nullopt;
        for (auto i : order) {
            if (s.tags[i] != Tag::W) continue;
            if (e_mass(s, s.points[i], R) < eps * R) return Ball{s.points[i], R};
        }
    }
}

inline Ball universal_seed_ball(const TaggedSample& s) {
    Point x0 = s.points[s.index->lex_order.front()];
    if (s.planar()) {
        std::vector<Point> sorted;
        sorted.reserve(s.size());
        for (auto i : s.index->lex_order) sorted.push_back(s.points[i]);
        const auto [p, q] = hull_diameter_pair(convex_hull_sorted(sorted));
        x0 = std::min(p, q);
    } else {
        double best = -1.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j) {
                const double d = dist2(s.points[i], s.points[j]);
                if (d > best) {
                    best = d;
                    x0 = std::min(s.points[i], s.points[j]);
                }
            }
    }
    return Ball{x0, s.diameter};
}

inline CoronaMeasure build_corona(const TaggedSample& s, const CoronaOptions& opt) {
    require(opt.M > 0.0, "M must be positive");
    require(opt.lambda > 0.0 && opt.lambda < 1.0, "lambda must lie in (0, 1)");
    require(opt.n_max >= 0, "n_max must be nonnegative");
    if (opt.variant == Variant::avoiding) require(opt.eps > 0.0 && opt.eps <= 0.01 + 1e-15, "eps must lie in (0, 1/100]");

    CoronaMeasure mu;
    mu.options = opt;
    if (opt.seed_ball) {
        mu.seed = *opt.seed_ball;
    } else if (opt.variant == Variant::universal) {
        mu.seed = universal_seed_ball(s);
    } else {
        auto b = find_seed_ball(s, opt.eps, opt.geom);
        if (!b) throw InternalError("measure construction stuck: no seed ball with E-density below eps");
        mu.seed = *b;
    }
    require(mu.seed.radius > 0.0, "seed radius must be positive");

    CoronaNode root;
    root.ball = mu.seed;
    root.mass = 1.0;
    mu.nodes.push_back(root);

    const bool avoiding = opt.variant == Variant::avoiding;
    auto spread = [&](int id, const std::vector<std::uint32_t>& candidates) {
        std::vector<std::uint32_t> use;
        double total = 0.0;
        for (auto p : candidates) {
            if (avoiding && s.e_weight[p] != 0.0) continue;
            use.push_back(p);
            total += s.spacing_weight(p);
        }
        if (use.empty() || !(total > 0.0))
            throw InternalError(detail::stuck_message(mu.nodes[static_cast<std::size_t>(id)], "leaf without admissible points"));
        const double m = mu.nodes[static_cast<std::size_t>(id)].mass;
        for (auto p : use) mu.atoms.push_back(Atom{p, m * s.spacing_weight(p) / total, id});
    };

    std::vector<int> frontier{0};
    for (int level = 0; !frontier.empty(); ++level) {
        std::vector<int> next;
        for (int id : frontier) {
            CoronaNode& node = mu.nodes[static_cast<std::size_t>(id)];
            const Ball B = node.ball;
            if (level >= opt.n_max) {
                const auto kb = s.ball_indices(B.center, B.radius);
                node.kb_count = kb.size();
                node.kind = NodeKind::terminal;
                spread(id, kb);
                continue;
            }
            Split sp = wiggly_split(s, B, opt.M, opt.lambda, opt.geom);
            mu.nodes[static_cast<std::size_t>(id)].kb_count = sp.kb.size();
            mu.nodes[static_cast<std::size_t>(id)].z_count = sp.z.size();
            mu.nodes[static_cast<std::size_t>(id)].z_length = sp.z_length;
            mu.nodes[static_cast<std::size_t>(id)].z_e_weight = sp.z_e_weight;
            if (sp.scales == 0) {
                mu.nodes[static_cast<std::size_t>(id)].kind = NodeKind::terminal;
                spread(id, sp.kb);
                continue;
            }
            if (!avoiding && (sp.z_length >= opt.good_fraction * B.radius || sp.w.empty())) {
                mu.nodes[static_cast<std::size_t>(id)].kind = NodeKind::good;
                spread(id, sp.z);
                continue;
            }
            if (avoiding && sp.w.empty()) {
                // flat everywhere: nothing to stop on, mass stays on Z(B) \ E
                mu.nodes[static_cast<std::size_t>(id)].kind = NodeKind::terminal;
                spread(id, sp.z);
                continue;
            }
            std::vector<Point> wp;
            std::vector<double> wt;
            for (std::size_t i = 0; i < sp.kb.size(); ++i)
                if (sp.t[i] > 0.0) {
                    wp.push_back(s.points[sp.kb[i]]);
                    wt.push_back(sp.t[i]);
                }
            const auto net = select_net(wp, wt);
            std::vector<Point> cp;
            std::vector<double> ct;
            for (auto i : net) {
                cp.push_back(wp[i]);
                ct.push_back(wt[i]);
            }
            CoronaNode& nd = mu.nodes[static_cast<std::size_t>(id)];
            nd.net_size = net.size();
            std::vector<std::size_t> keep(net.size());
            std::iota(keep.begin(), keep.end(), std::size_t{0});
            if (avoiding) {
                const auto f = filter_net(s, cp, ct, opt.eps, B.radius);
                keep = f.kept;
                nd.e_total = f.e_total;
            }
            std::vector<double> kt;
            for (auto i : keep) kt.push_back(ct[i]);
            nd.sum_t = std::accumulate(kt.begin(), kt.end(), 0.0);
            nd.pass10 = nd.sum_t >= 10.0 * B.radius;
            nd.pass23 = nd.sum_t >= 23.0 * B.radius;
            nd.kind = avoiding ? NodeKind::internal : NodeKind::bad;
            if (keep.empty())
                throw InternalError(detail::stuck_message(nd, avoiding ? "every net ball carries too much E-mass"
                                                                       : "empty net"));
            const auto w = local_measure(kt);
            const double parent_mass = nd.mass;
            for (std::size_t k = 0; k < keep.size(); ++k) {
                CoronaNode child;
                child.ball = Ball{cp[keep[k]], ct[keep[k]]};
                child.level = level + 1;
                child.parent = id;
                child.mass = parent_mass * w[k];
                const int cid = static_cast<int>(mu.nodes.size());
                mu.nodes.push_back(child);
                mu.nodes[static_cast<std::size_t>(id)].children.push_back(cid);
                next.push_back(cid);
            }
        }
        if (!next.empty()) mu.depth = level + 1;
        frontier = std::move(next);
    }
    detail::finish_index(mu, s);
    return mu;
}

struct StructureCheck {
    std::vector<double> level_mass;  // mass on level n plus leaves above it
    double max_mass_error = 0.0;
    std::size_t overlap_same_level = 0;    // B1' n B2' != 0 (children, any parents) and B1 n B2
    std::size_t overlap_parent_child = 0;  // B1 n B2' with B2' a child of B2 != B1
    std::size_t overlap_child_parent = 0;  // B1' n B2 with B1' a child of B1 != B2
    std::size_t not_contained = 0;         // child not inside its closed parent ball
    std::size_t not_contained_2x = 0;      // child not inside the doubled parent ball
    double max_radius_ratio = 0.0;
    double max_density_ratio = 0.0;        // (mass/radius) child over parent
    std::size_t child_mass_excess = 0;     // child mass > t/(10 R_B) * parent mass
    std::size_t balls = 0;

    bool disjoint() const { return overlap_same_level == 0 && overlap_parent_child == 0 && overlap_child_parent == 0; }
};

// Exhaustive check of the tree invariants.
inline StructureCheck verify_structure(const CoronaMeasure& mu, int dim = 2) {
    StructureCheck out;
    out.balls = mu.nodes.size();
    std::vector<std::vector<int>> levels(static_cast<std::size_t>(mu.depth + 1));
    for (std::size_t i = 0; i < mu.nodes.size(); ++i)
        levels[static_cast<std::size_t>(mu.nodes[i].level)].push_back(static_cast<int>(i));

    double leaves_above = 0.0;
    for (std::size_t n = 0; n < levels.size(); ++n) {
        double m = 0.0;
        for (int id : levels[n]) m += mu.nodes[static_cast<std::size_t>(id)].mass;
        out.level_mass.push_back(m + leaves_above);
        out.max_mass_error = std::max(out.max_mass_error, std::abs(m + leaves_above - 1.0));
        for (int id : levels[n])
            if (mu.nodes[static_cast<std::size_t>(id)].children.empty()) leaves_above += mu.nodes[static_cast<std::size_t>(id)].mass;
    }
    out.max_mass_error = std::max(out.max_mass_error, std::abs(mu.total_mass() - 1.0));

    auto overlap = [](const Ball& a, const Ball& b) {
        return dist(a.center, b.center) < (a.radius + b.radius) * (1.0 - 1e-12);
    };
    // index over the balls of each level
    for (std::size_t n = 0; n < levels.size(); ++n) {
        const auto& ids = levels[n];
        std::vector<Point> centers;
        double rmax = 0.0;
        for (int id : ids) {
            centers.push_back(mu.nodes[static_cast<std::size_t>(id)].ball.center);
            rmax = std::max(rmax, mu.nodes[static_cast<std::size_t>(id)].ball.radius);
        }
        KdTree tree(centers, dim);
        for (std::size_t a = 0; a < ids.size(); ++a) {
            const auto& A = mu.nodes[static_cast<std::size_t>(ids[a])];
            tree.for_each_in_ball(A.ball.center, A.ball.radius + rmax, [&](std::uint32_t b) {
                if (b > a && overlap(A.ball, mu.nodes[static_cast<std::size_t>(ids[b])].ball)) ++out.overlap_same_level;
            });
        }
        if (n + 1 >= levels.size()) continue;
        // position of each level-n node in `ids`
        std::unordered_map<int, std::size_t> pos;
        for (std::size_t a = 0; a < ids.size(); ++a) pos[ids[a]] = a;
        for (int cid : levels[n + 1]) {
            const auto& C = mu.nodes[static_cast<std::size_t>(cid)];
            const std::size_t own = pos.at(C.parent);
            tree.for_each_in_ball(C.ball.center, C.ball.radius + rmax, [&](std::uint32_t b) {
                if (b == own) return;
                if (!overlap(C.ball, mu.nodes[static_cast<std::size_t>(ids[b])].ball)) return;
                // ordered pair (B1, B2) with B1 first in level order
                if (b < own) ++out.overlap_parent_child;
                else ++out.overlap_child_parent;
            });
        }
    }
    for (const auto& c : mu.nodes) {
        if (c.parent < 0) continue;
        const auto& p = mu.nodes[static_cast<std::size_t>(c.parent)];
        const double reach = dist(c.ball.center, p.ball.center) + c.ball.radius;
        if (reach > p.ball.radius * (1.0 + 1e-12)) ++out.not_contained;
        if (reach > 2.0 * p.ball.radius * (1.0 + 1e-12)) ++out.not_contained_2x;
        out.max_radius_ratio = std::max(out.max_radius_ratio, c.ball.radius / p.ball.radius);
        if (p.mass > 0.0)
            out.max_density_ratio = std::max(out.max_density_ratio, (c.mass / c.ball.radius) / (p.mass / p.ball.radius));
        if (c.mass > c.ball.radius / (10.0 * p.ball.radius) * p.mass * (1.0 + 1e-12)) ++out.child_mass_excess;
    }
    return out;
}

struct AuditProbe {
    Point x;
    double r = 0.0;
    double mu = 0.0;
    double integral = 0.0;
};

struct ScalingAudit {
    std::vector<AuditProbe> probes;
    double R = 0.0;
    double C = 0.0;              // max mu R / r (seed-normalized linear bound)
    double C_unnormalized = 0.0; // max mu / r
    double C_prime = 0.0;        // envelope slope in log(mu R / r) = log C_env - C' * integral
    double C_env = 0.0;
    double C_prime_same_C = 0.0; // largest C' valid with the linear C itself
    bool integral_constant = false;  // every probe had the same integral (C' unconstrained)
    std::size_t violations_linear = 0;
    std::size_t violations_envelope = 0;
};

// Probes x from the atoms and r on the grid R lambda^j inside the resolved
// window, then fits the constants of mu(B(x,r)) <= C (r/R) exp(-C' I(x,r)),
// I = integral_r^R beta_K^2 dt/t.
inline ScalingAudit scaling_audit(const CoronaMeasure& mu, const TaggedSample& s, std::size_t probe_count,
                                  std::uint64_t seed = 12345, const GeometryOptions& geom = {}) {
    require(!mu.atoms.empty(), "measure has no atoms");
    ScalingAudit out;
    out.R = mu.seed.radius;
    const double lambda = mu.options.lambda;
    const double floor_r = geom.resolution_guard * s.resolution * (1.0 - 1e-12);
    int J = 0;
    while (out.R * std::pow(lambda, J + 1) >= floor_r) ++J;

    std::mt19937_64 rng(seed);
    std::vector<std::pair<std::uint32_t, int>> draws;
    for (std::size_t k = 0; k < probe_count; ++k) {
        const auto a = static_cast<std::uint32_t>(rng() % mu.atoms.size());
        const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(J + 1));
        draws.emplace_back(a, j);
    }
    out.probes.resize(draws.size());
    const double step = std::log(1.0 / lambda);
    parallel_for(draws.size(), [&](std::size_t k) {
        const Point x = s.points[mu.atoms[draws[k].first].point];
        const int j = draws[k].second;
        AuditProbe p;
        p.x = x;
        p.r = out.R * std::pow(lambda, j);
        double I = 0.0;
        for (int i = 0; i < j; ++i) {
            const double b = beta_ball(s, x, out.R * std::pow(lambda, i), geom);
            I += step * b * b;
        }
        p.integral = I;
        p.mu = measure_query(mu, x, p.r);
        out.probes[k] = p;
    });

    std::vector<std::pair<double, double>> uv;
    for (const auto& p : out.probes) {
        out.C = std::max(out.C, p.mu * out.R / p.r);
        out.C_unnormalized = std::max(out.C_unnormalized, p.mu / p.r);
        uv.emplace_back(p.integral, std::log(p.mu * out.R / p.r));
    }
    // C' for the linear C: the tightest slope among probes with I > 0
    double literal = INFINITY;
    const double logC = std::log(out.C);
    for (const auto& [u, v] : uv)
        if (u > 0.0) literal = std::min(literal, (logC - v) / u);
    out.C_prime_same_C = std::isfinite(literal) ? std::max(0.0, literal) : 0.0;

    // upper envelope line of (u, v) supporting at the mean u
    std::sort(uv.begin(), uv.end());
    double ubar = 0.0;
    for (const auto& [u, v] : uv) ubar += u;
    ubar /= static_cast<double>(uv.size());
    out.integral_constant = uv.front().first == uv.back().first;
    double slope = 0.0;
    if (!out.integral_constant) {
        std::vector<std::pair<double, double>> hull;
        for (const auto& p : uv) {
            // equal u: sorted ascending in v, so the later point dominates
            while (!hull.empty() && hull.back().first == p.first) hull.pop_back();
            while (hull.size() >= 2) {
                const auto& a = hull[hull.size() - 2];
                const auto& b = hull.back();
                const double cr = (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
                if (cr >= 0.0) hull.pop_back();
                else break;
            }
            hull.push_back(p);
        }
        for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
            if (hull[i].first <= ubar && ubar <= hull[i + 1].first) {
                slope = (hull[i + 1].second - hull[i].second) / (hull[i + 1].first - hull[i].first);
                break;
            }
        }
        slope = std::min(slope, 0.0);
    }
    double a = -INFINITY;
    for (const auto& [u, v] : uv) a = std::max(a, v - slope * u);
    out.C_prime = slope < 0.0 ? -slope : 0.0;
    out.C_env = std::exp(a);
    for (const auto& p : out.probes) {
        if (p.mu > out.C * p.r / out.R * (1.0 + 1e-9)) ++out.violations_linear;
        if (p.mu > out.C_env * p.r / out.R * std::exp(-out.C_prime * p.integral) * (1.0 + 1e-9)) ++out.violations_envelope;
    }
    return out;
}

}  // namespace wiggly
