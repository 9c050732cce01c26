#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "error.hpp"
#include "kdtree.hpp"
#include "point.hpp"
#include "sample.hpp"

namespace wiggly {

struct GeneratorSpec {
    std::string family;
    int level = -1;             // family default when negative
    double resolution = 0.0;    // family default when zero
    double alpha = 1.0 / 3.0;   // cantor_alpha, comb_R_alpha
    int copies = 0;             // comb_R_alpha: number of rescaled copies
    int slices = -1;            // cone_join, product_lift: 2^slices height steps
    std::string base = "cantor_third";
    std::complex<double> c{0.0, 1.0};  // julia
    int depth = 20;                    // julia
    int seed_count = 1;                // julia
};

struct GroundTruth {
    std::optional<double> known_dim;
    std::optional<double> total_E_length;
    std::optional<bool> uniformly_wiggly;
    std::string notes;
};

struct Generated {
    GeneratorSpec spec;
    TaggedSample sample;
    GroundTruth truth;
};

inline const std::vector<std::string>& generator_families() {
    static const std::vector<std::string> f{"segment",     "circle",       "koch",          "cantor_alpha",
                                            "cantor_third", "four_corners", "warsaw_sine",   "hairy_segment",
                                            "comb_blocks", "comb_R_alpha", "cone_join",     "product_lift",
                                            "julia"};
    return f;
}

namespace gen {

// Accumulates tagged points, merging exact duplicates (quantum 1e-12).
class Builder {
public:
    void add(double x, double y, Tag tag, double w) {
        const auto key = std::make_pair(std::llround(x * 1e12), std::llround(y * 1e12));
        auto it = where_.find(key);
        if (it == where_.end()) {
            where_.emplace(key, pts_.size());
            pts_.push_back({x, y});
            tags_.push_back(tag);
            w_.push_back(tag == Tag::W ? 0.0 : w);
            return;
        }
        const std::size_t i = it->second;
        if (tags_[i] == Tag::E && tag == Tag::E) w_[i] += w;
        else if (tags_[i] == Tag::E && tag == Tag::W) {
            dropped_ += w_[i];
            tags_[i] = Tag::W;
            w_[i] = 0.0;
        } else if (tag == Tag::E) {
            dropped_ += w;
        }
    }

    // Evenly spaced points on [a, b] with spacing at most h, endpoints included.
    // Each carries length / count as E-weight.
    void segment(const Point& a, const Point& b, double h, Tag tag, bool even_count = false) {
        const double len = dist(a, b);
        std::size_t k = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(len / h)) + 1);
        if (even_count && k % 2 == 1) ++k;
        const double w = len / static_cast<double>(k);
        for (std::size_t j = 0; j < k; ++j) {
            const double t = static_cast<double>(j) / static_cast<double>(k - 1);
            add(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), tag, w);
        }
    }

    TaggedSample finish(double resolution) {
        TaggedSample s;
        s.points = std::move(pts_);
        s.tags = std::move(tags_);
        s.e_weight = std::move(w_);
        s.resolution = resolution;
        s.ambient_dim = 2;
        s.finalize();
        return s;
    }

    double dropped_weight() const { return dropped_; }

private:
    std::vector<Point> pts_;
    std::vector<Tag> tags_;
    std::vector<double> w_;
    std::map<std::pair<long long, long long>, std::size_t> where_;
    double dropped_ = 0.0;
};

inline void unreachable(const std::string& family, double h, int achievable) {
    throw DataError("resolution " + std::to_string(h) + " unreachable for " + family +
                    "; achievable level: " + std::to_string(achievable));
}

// Intervals [a, b] of the middle-alpha Cantor construction at a level.
inline std::vector<std::pair<double, double>> cantor_intervals(double alpha, int level) {
    std::vector<std::pair<double, double>> cur{{0.0, 1.0}};
    const double keep = (1.0 - alpha) / 2.0;
    for (int n = 0; n < level; ++n) {
        std::vector<std::pair<double, double>> next;
        next.reserve(cur.size() * 2);
        for (auto [a, b] : cur) {
            const double l = (b - a) * keep;
            next.emplace_back(a, a + l);
            next.emplace_back(b - l, b);
        }
        cur = std::move(next);
    }
    return cur;
}

inline std::vector<double> cantor_points(double alpha, int level) {
    std::vector<double> out;
    for (auto [a, b] : cantor_intervals(alpha, level)) {
        out.push_back(a);
        out.push_back(b);
    }
    return out;
}

inline Generated segment(GeneratorSpec spec) {
    if (spec.level < 0) spec.level = 10;
    const long long n = (1LL << spec.level) + 1;
    const double h = 1.0 / static_cast<double>(n - 1);
    Builder b;
    for (long long i = 0; i < n; ++i) b.add(static_cast<double>(i) * h, 0.0, Tag::W, 0.0);
    Generated g{spec, b.finish(h), {}};
    g.truth.known_dim = 1.0;
    g.truth.total_E_length = 0.0;
    g.truth.uniformly_wiggly = false;
    g.truth.notes = "unit segment, length 1";
    return g;
}

inline Generated circle(GeneratorSpec spec) {
    if (spec.level < 0) spec.level = 12;
    const long long n = 1LL << spec.level;
    Builder b;
    for (long long i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        b.add(std::cos(t), std::sin(t), Tag::W, 0.0);
    }
    const double h = 2.0 * std::sin(std::numbers::pi / static_cast<double>(n));
    Generated g{spec, b.finish(h), {}};
    g.truth.known_dim = 1.0;
    g.truth.total_E_length = 0.0;
    g.truth.uniformly_wiggly = false;
    g.truth.notes = "unit circle, length 2*pi";
    return g;
}

inline std::vector<Point> koch_vertices(int level) {
    std::vector<Point> cur{{0.0, 0.0}, {1.0, 0.0}};
    const double c60 = 0.5, s60 = std::sqrt(3.0) / 2.0;
    for (int n = 0; n < level; ++n) {
        std::vector<Point> next;
        next.reserve(cur.size() * 4);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const Point a = cur[i], e = cur[i + 1];
            const Point d = (1.0 / 3.0) * (e - a);
            const Point p1 = a + d;
            const Point p3 = a + 2.0 * d;
            const Point peak = p1 + Point{c60 * d[0] - s60 * d[1], s60 * d[0] + c60 * d[1]};
            next.push_back(a);
            next.push_back(p1);
            next.push_back(peak);
            next.push_back(p3);
        }
        next.push_back(cur.back());
        cur = std::move(next);
    }
    return cur;
}

inline Generated koch(GeneratorSpec spec) {
    if (spec.level < 0) spec.level = 7;
    require(spec.level <= 10, "koch level above 10 is not supported");
    Builder b;
    const auto v = koch_vertices(spec.level);
    double h = std::pow(3.0, -spec.level);
    if (spec.resolution > 0.0 && spec.resolution < h) {
        // polygon edges sampled at the requested pitch
        h = spec.resolution;
        for (std::size_t i = 0; i + 1 < v.size(); ++i) b.segment(v[i], v[i + 1], h, Tag::W, false);
    } else {
        for (const auto& p : v) b.add(p[0], p[1], Tag::W, 0.0);
    }
    Generated g{spec, b.finish(h), {}};
    g.truth.known_dim = std::log(4.0) / std::log(3.0);
    g.truth.total_E_length = 0.0;
    g.truth.uniformly_wiggly = true;
    g.truth.notes = "Koch curve vertices; polygon length (4/3)^level = " + std::to_string(std::pow(4.0 / 3.0, spec.level));
    return g;
}

inline Generated cantor(GeneratorSpec spec, bool third) {
    if (third) spec.alpha = 1.0 / 3.0;
    require(spec.alpha > 0.0 && spec.alpha < 1.0, "cantor alpha must lie in (0, 1)");
    if (spec.level < 0) spec.level = 12;
    Builder b;
    for (double x : cantor_points(spec.alpha, spec.level)) b.add(x, 0.0, Tag::W, 0.0);
    const double h = std::pow((1.0 - spec.alpha) / 2.0, spec.level);
    Generated g{spec, b.finish(h), {}};
    g.truth.known_dim = std::log(2.0) / std::log(2.0 / (1.0 - spec.alpha));
    g.truth.total_E_length = 0.0;
    g.truth.uniformly_wiggly = false;
    g.truth.notes = "middle-alpha Cantor set, interval endpoints at the given level";
    return g;
}

// Stage m squares have side 4^-m / (m+1)^2.
inline double four_corners_side(int m) { return std::pow(4.0, -m) / ((m + 1.0) * (m + 1.0)); }

inline double four_corners_e_length(int level) {
    double s = 0.0;
    for (int m = 0; m <= level; ++m) s += std::pow(4.0, m) * four_corners_side(m);
    return 2.0 * std::sqrt(2.0) * s;
}

inline Generated four_corners(GeneratorSpec spec) {
    if (spec.level < 0) spec.level = 4;
    if (spec.resolution <= 0.0) spec.resolution = 1e-3;
    const double h = spec.resolution;
    const int n = spec.level;
    if (four_corners_side(n) / std::sqrt(2.0) > h) {
        int ok = n;
        while (four_corners_side(ok) / std::sqrt(2.0) > h) ++ok;
        unreachable("four_corners", h, ok);
    }
    // squares as (corner x, corner y), one vector per stage
    std::vector<std::pair<double, double>> cur{{0.0, 0.0}};
    Builder b;
    for (int m = 0; m <= n; ++m) {
        const double s = four_corners_side(m);
        for (auto [x, y] : cur) {
            b.segment({x, y}, {x + s, y + s}, h, Tag::E, true);
            b.segment({x + s, y}, {x, y + s}, h, Tag::E, true);
        }
        if (m == n) break;
        const double t = four_corners_side(m + 1);
        std::vector<std::pair<double, double>> next;
        next.reserve(cur.size() * 4);
        for (auto [x, y] : cur) {
            next.emplace_back(x, y);
            next.emplace_back(x + s - t, y);
            next.emplace_back(x, y + s - t);
            next.emplace_back(x + s - t, y + s - t);
        }
        cur = std::move(next);
    }
    const double s = four_corners_side(n);
    for (auto [x, y] : cur) b.add(x + 0.5 * s, y + 0.5 * s, Tag::W, 0.0);
    Generated g{spec, b.finish(h), {}};
    g.truth.known_dim = 1.0;
    g.truth.total_E_length = four_corners_e_length(n);
    g.truth.uniformly_wiggly = false;
    g.truth.notes = "a_n = n^2/(n+1)^2; W = stage-level square centers; E = diagonals of stages 0..level "
                    "(overlaps counted); infinite-level E length " +
                    std::to_string(2.0 * std::sqrt(2.0) * std::numbers::pi * std::numbers::pi / 6.0);
    return g;
}

inline Generated warsaw_sine(GeneratorSpec spec) {
    if (spec.resolution <= 0.0) spec.resolution = 0.005;
    const double h = spec.resolution;
    require(h < 0.5, "warsaw_sine resolution must be below 0.5");
    Builder b;
    // closed W segment {0} x [-1, 1]
    b.segment({0.0, -1.0}, {0.0, 1.0}, h, Tag::W);
    // graph of sin(1/x) on [h, 1], walked from x = 1 towards 0 and emitted at
    // arc-length steps of h
    double x = 1.0;
    double y = std::sin(1.0);
    double since = 0.0;
    double total = 0.0;
    std::vector<double> xs{x};
    while (x > h) {
        const double slope = std::abs(std::cos(1.0 / x)) / (x * x);
        double dx = 0.25 * h / std::sqrt(1.0 + slope * slope);
        dx = std::min(dx, x - h);
        if (dx <= 0.0) break;
        const double nx = x - dx;
        const double ny = std::sin(1.0 / nx);
        const double ds = std::hypot(dx, ny - y);
        since += ds;
        total += ds;
        x = nx;
        y = ny;
        if (since >= 0.75 * h) {
            xs.push_back(x);
            since = 0.0;
        }
    }
    if (xs.back() != x) xs.push_back(x);
    const double w = total / static_cast<double>(xs.size());
    for (double px : xs) b.add(px, std::sin(1.0 / px), Tag::E, w);
    Generated g{spec, b.finish(h), {}};
    g.truth.known_dim = 1.0;
    g.truth.total_E_length = total;
    g.truth.uniformly_wiggly = false;
    g.truth.notes = "graph of sin(1/x) truncated at x >= resolution (length infinite in the limit); "
                    "W = {0} x [-1, 1]; Hausdorff dimension 1, box dimension of the graph 3/2";
    return g;
}

inline Generated hairy_segment(GeneratorSpec spec) {
    if (spec.level < 0) spec.level = 8;
    const int n = spec.level;
    const double h = std::ldexp(1.0, -(n + 1));
    if (spec.resolution > 0.0 && spec.resolution < h) unreachable("hairy_segment", spec.resolution, n);
    Builder b;
    const long long wn = 1LL << (n + 1);
    for (long long i = 0; i <= wn; ++i) b.add(static_cast<double>(i) * h, 0.0, Tag::W, 0.0);
    double e_len = 0.0;
    for (int m = 1; m <= n; ++m) {
        const double half = std::ldexp(1.0, -m - 1);
        const long long J = std::max<long long>(1, static_cast<long long>(std::ceil(half / h)));
        const double delta = half / static_cast<double>(J);
        for (long long k = 1; k < (1LL << m); k += 2) {
            const double cx = std::ldexp(static_cast<double>(k), -m);
            for (long long j = 1; j <= J; ++j) {
                b.add(cx, static_cast<double>(j) * delta, Tag::E, delta);
                b.add(cx, -static_cast<double>(j) * delta, Tag::E, delta);
            }
            e_len += 2.0 * half;
        }
    }
    Generated g{spec, b.finish(h), {}};
    g.truth.known_dim = 1.0;
    g.truth.total_E_length = e_len;
    g.truth.uniformly_wiggly = true;
    g.truth.notes = "W = [0,1]; E = vertical segments of length 2^-m centred at odd multiples of 2^-m, m <= level";
    return g;
}

inline Generated comb_blocks(GeneratorSpec spec) {
    if (spec.level < 0) spec.level = 4;
    const int mm = spec.level;
    if (spec.resolution <= 0.0) spec.resolution = std::ldexp(1.0, -2 * mm - 2);
    const double h = spec.resolution;
    Builder b;
    b.segment({0.0, 0.0}, {1.0, 0.0}, h, Tag::W);
    double e_len = 0.0;
    for (int m = 1; m <= mm; ++m) {
        const double len = std::ldexp(1.0, -4 * m);
        const double pitch = std::ldexp(1.0, -2 * m);
        const long long cols = (1LL << (2 * m)) - 1;
        for (long long k = 0; k < (1LL << m); ++k) {
            const double y = std::ldexp(1.0, -m) + static_cast<double>(k) * pitch;
            for (int sign : {1, -1}) {
                for (long long kk = 1; kk <= cols; ++kk) {
                    const double x0 = static_cast<double>(kk) * pitch;
                    b.segment({x0, sign * y}, {x0 + len, sign * y}, h, Tag::E);
                    e_len += len;
                }
            }
        }
    }
    Generated g{spec, b.finish(h), {}};
    g.truth.known_dim = 1.0;
    g.truth.total_E_length = e_len;
    g.truth.uniformly_wiggly = false;
    g.truth.notes = "W = [0,1]; E = translated blocks K_m = [0, 2^-4m] + k 2^-2m at heights +-(2^-m + k 2^-2m), m <= level";
    return g;
}

// Skeleton R_alpha: [0,1] plus, for every Cantor interval J of stages
// 1..levels, the boundary of the square on J, n horizontal segments spanning
// 2J at heights k|J|/n, and the mirror image below the axis.
inline std::vector<std::pair<Point, Point>> comb_r_alpha_segments(double alpha, int levels) {
    std::vector<std::pair<Point, Point>> segs;
    for (int n = 1; n <= levels; ++n) {
        for (auto [a, b] : cantor_intervals(alpha, n)) {
            const double l = b - a;
            const double mid = 0.5 * (a + b);
            for (double sg : {1.0, -1.0}) {
                segs.push_back({{a, 0.0}, {a, sg * l}});
                segs.push_back({{b, 0.0}, {b, sg * l}});
                segs.push_back({{a, sg * l}, {b, sg * l}});
                for (int k = 1; k <= n; ++k) {
                    const double y = sg * l * k / n;
                    segs.push_back({{mid - l, y}, {mid + l, y}});
                }
            }
        }
    }
    return segs;
}

inline Generated comb_R_alpha(GeneratorSpec spec) {
    if (spec.level < 0) spec.level = 5;
    if (spec.resolution <= 0.0) spec.resolution = std::ldexp(1.0, -10);
    require(spec.alpha > 0.0 && spec.alpha < 1.0, "alpha must lie in (0, 1)");
    const double h = spec.resolution;
    Builder b;
    b.segment({0.0, 0.0}, {1.0, 0.0}, h, Tag::W);
    double e_len = 0.0;
    auto emit = [&](const std::vector<std::pair<Point, Point>>& segs, double scale, double shift) {
        for (const auto& [p, q] : segs) {
            const Point a{scale * p[0] + shift, scale * p[1]};
            const Point c{scale * q[0] + shift, scale * q[1]};
            b.segment(a, c, h, Tag::E);
            e_len += dist(a, c);
        }
    };
    if (spec.copies <= 0) {
        emit(comb_r_alpha_segments(spec.alpha, spec.level), 1.0, 0.0);
    } else {
        for (int k = 1; k <= spec.copies; ++k) {
            const double ak = spec.alpha * std::ldexp(1.0, -(k - 1));
            const auto segs = comb_r_alpha_segments(ak, spec.level);
            double len = 1.0;
            for (const auto& [p, q] : segs) len += dist(p, q);
            const double beta_k = std::pow(4.0, -k) / len;
            b.segment({1.0 / k, 0.0}, {1.0 / k + beta_k, 0.0}, h, Tag::E);
            e_len += beta_k;
            emit(segs, beta_k, 1.0 / k);
        }
    }
    Generated g{spec, b.finish(h), {}};
    g.truth.known_dim = 1.0;
    g.truth.total_E_length = e_len;
    g.truth.uniformly_wiggly = false;
    g.truth.notes = spec.copies <= 0 ? "single skeleton R_alpha" :
                                       "union of copies beta_k R_{alpha_k} + 1/k, alpha_k = alpha 2^-(k-1), "
                                       "beta_k = 4^-k / length(R_{alpha_k})";
    return g;
}

inline std::vector<double> base_points(const GeneratorSpec& spec, int level) {
    if (spec.base == "cantor_third") return cantor_points(1.0 / 3.0, level);
    if (spec.base == "cantor_alpha") return cantor_points(spec.alpha, level);
    if (spec.base == "segment") {
        std::vector<double> v;
        const long long n = 1LL << level;
        for (long long i = 0; i <= n; ++i) v.push_back(static_cast<double>(i) / static_cast<double>(n));
        return v;
    }
    throw DataError("unknown base set: " + spec.base);
}

inline double base_dim(const GeneratorSpec& spec) {
    if (spec.base == "cantor_third") return std::log(2.0) / std::log(3.0);
    if (spec.base == "cantor_alpha") return std::log(2.0) / std::log(2.0 / (1.0 - spec.alpha));
    return 1.0;
}

inline double base_spacing(const GeneratorSpec& spec, int level) {
    if (spec.base == "cantor_third") return std::pow(3.0, -level);
    if (spec.base == "cantor_alpha") return std::pow((1.0 - spec.alpha) / 2.0, level);
    return std::ldexp(1.0, -level);
}

// Union of segments from the lifted base set N x {0} to S = (1, 1),
// sampled on horizontal slices 2^-slices apart.
inline Generated cone_join(GeneratorSpec spec) {
    if (spec.level < 0) spec.level = 8;
    if (spec.slices < 0) spec.slices = 9;
    const auto base = base_points(spec, spec.level);
    const long long ns = 1LL << spec.slices;
    Builder b;
    for (long long j = 0; j <= ns; ++j) {
        const double y = static_cast<double>(j) / static_cast<double>(ns);
        for (double c : base) b.add((1.0 - y) * c + y, y, Tag::W, 0.0);
    }
    const double h = std::max(base_spacing(spec, spec.level), std::sqrt(2.0) / static_cast<double>(ns));
    Generated g{spec, b.finish(h), {}};
    g.truth.known_dim = 1.0 + base_dim(spec);
    g.truth.total_E_length = 0.0;
    g.truth.uniformly_wiggly = false;
    g.truth.notes = "cone over " + spec.base + " with apex (1,1)";
    return g;
}

inline Generated product_lift(GeneratorSpec spec) {
    if (spec.level < 0) spec.level = 8;
    if (spec.slices < 0) spec.slices = 9;
    const auto base = base_points(spec, spec.level);
    const long long ns = 1LL << spec.slices;
    Builder b;
    for (long long j = 0; j <= ns; ++j) {
        const double y = static_cast<double>(j) / static_cast<double>(ns);
        for (double c : base) b.add(c, y, Tag::W, 0.0);
    }
    const double h = std::max(base_spacing(spec, spec.level), 1.0 / static_cast<double>(ns));
    Generated g{spec, b.finish(h), {}};
    g.truth.known_dim = 1.0 + base_dim(spec);
    g.truth.total_E_length = 0.0;
    g.truth.uniformly_wiggly = false;
    g.truth.notes = spec.base + " x [0,1]";
    return g;
}

struct CuratedJulia {
    std::complex<double> c;
    const char* name;
    std::optional<double> dim;
};

inline const std::vector<CuratedJulia>& curated_julia() {
    static const std::vector<CuratedJulia> v{
        {{0.0, 0.0}, "circle", 1.0},
        {{0.0, 1.0}, "dendrite (c = i)", std::nullopt},
        {{0.0, -1.0}, "dendrite (c = -i)", std::nullopt},
        {{-2.0, 0.0}, "segment [-2, 2]", 1.0},
        {{-1.0, 0.0}, "basilica", std::nullopt},
        {{-1.5436890126920764, 0.0}, "real Misiurewicz parameter", std::nullopt},
    };
    return v;
}

// Backward orbit of a repelling fixed point of z^2 + c: all preimages up to
// `depth` under both branches, continued along branches that still land in
// new cells, deduplicated on a grid of pitch `resolution`.
inline Generated julia(GeneratorSpec spec) {
    if (spec.resolution <= 0.0) spec.resolution = 4e-4;
    require(spec.depth >= 10, "julia depth must be at least 10");
    require(spec.depth <= 24, "julia depth above 24 is not supported");
    const CuratedJulia* hit = nullptr;
    for (const auto& cj : curated_julia())
        if (std::abs(cj.c - spec.c) < 1e-9) hit = &cj;
    if (hit == nullptr) throw DataError("c outside the curated list; inverse iteration may diverge");
    const std::complex<double> c = hit->c;
    const std::complex<double> disc = std::sqrt(std::complex<double>(1.0, 0.0) - 4.0 * c);
    std::vector<std::complex<double>> fixed{(1.0 + disc) / 2.0, (1.0 - disc) / 2.0};
    std::sort(fixed.begin(), fixed.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
    std::vector<std::complex<double>> seeds;
    for (auto z : fixed)
        if (std::abs(2.0 * z) > 1.0 + 1e-12 && static_cast<int>(seeds.size()) < std::max(1, spec.seed_count))
            seeds.push_back(z);
    if (seeds.empty()) throw InternalError("no repelling fixed point");

    const double pitch = spec.resolution;
    std::map<std::pair<long long, long long>, std::complex<double>> cells;
    auto fresh = [&](std::complex<double> z) {
        const auto key = std::make_pair(static_cast<long long>(std::floor(z.real() / pitch)),
                                        static_cast<long long>(std::floor(z.imag() / pitch)));
        return cells.emplace(key, z).second;
    };
    // Full binary tree down to `depth`, then only branches that still reach
    // unvisited cells (bounded by the cell count).
    std::vector<std::complex<double>> level = seeds;
    for (auto z : level) fresh(z);
    const int cap = spec.depth + 400;
    for (int d = 0; d < cap && !level.empty(); ++d) {
        std::vector<std::complex<double>> next;
        next.reserve(d < spec.depth ? level.size() * 2 : level.size());
        for (auto z : level) {
            const auto w = std::sqrt(z - c);
            for (auto q : {w, -w})
                if (fresh(q) || d < spec.depth) next.push_back(q);
        }
        level = std::move(next);
    }
    Builder b;
    for (auto& [k, z] : cells) b.add(z.real(), z.imag(), Tag::W, 0.0);
    TaggedSample sample = b.finish(pitch);
    // declared resolution is the larger of the pitch and the widest observed
    // nearest-neighbour gap
    double gap = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const auto d = sample.tree().knn_dists(sample.points[i], 1, static_cast<long long>(i));
        if (!d.empty()) gap = std::max(gap, d[0]);
    }
    if (gap > pitch) {
        sample.resolution = gap;
        sample.finalize();
    }
    Generated g{spec, std::move(sample), {}};
    g.truth.known_dim = hit->dim;
    g.truth.total_E_length = 0.0;
    g.truth.uniformly_wiggly = hit->dim.has_value() ? std::optional<bool>(false) : std::nullopt;
    g.truth.notes = std::string("Julia set of z^2 + c: ") + hit->name + "; backward orbit of a repelling fixed point";
    return g;
}

}  // namespace gen

inline Generated generate(const GeneratorSpec& spec) {
    const auto& f = spec.family;
    if (f == "segment") return gen::segment(spec);
    if (f == "circle") return gen::circle(spec);
    if (f == "koch") return gen::koch(spec);
    if (f == "cantor_third") return gen::cantor(spec, true);
    if (f == "cantor_alpha") return gen::cantor(spec, false);
    if (f == "four_corners") return gen::four_corners(spec);
    if (f == "warsaw_sine") return gen::warsaw_sine(spec);
    if (f == "hairy_segment") return gen::hairy_segment(spec);
    if (f == "comb_blocks") return gen::comb_blocks(spec);
    if (f == "comb_R_alpha") return gen::comb_R_alpha(spec);
    if (f == "cone_join") return gen::cone_join(spec);
    if (f == "product_lift") return gen::product_lift(spec);
    if (f == "julia") return gen::julia(spec);
    throw DataError("unknown family: " + f);
}

struct ResolutionAudit {
    double max_nn = 0.0;
    bool pass = false;
};

// Largest nearest-neighbour distance compared with the declared resolution.
inline ResolutionAudit audit_resolution(const TaggedSample& s) {
    ResolutionAudit a;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto d = s.tree().knn_dists(s.points[i], 1, static_cast<long long>(i));
        if (!d.empty()) a.max_nn = std::max(a.max_nn, d[0]);
    }
    a.pass = a.max_nn <= s.resolution * (1.0 + 1e-9);
    return a;
}

}  // namespace wiggly
