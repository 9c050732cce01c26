#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "core_geometry.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "sample.hpp"

namespace wiggly {

// Scales lambda^k for k in [k_min, k_max]; larger k means finer scale.
struct ScaleGrid {
    double lambda = 0.5;
    int k_min = 0;
    int k_max = -1;

    double scale(int k) const { return std::pow(lambda, k); }
    int size() const { return std::max(0, k_max - k_min + 1); }
    bool empty() const { return size() == 0; }
    double log_step() const { return std::log(1.0 / lambda); }
};

// Grid clamped to [guard * resolution, diameter].
inline ScaleGrid make_scale_grid(const TaggedSample& s, double lambda = 0.5, double guard = 10.0) {
    require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
    const double ll = std::log(lambda);
    ScaleGrid g;
    g.lambda = lambda;
    g.k_min = static_cast<int>(std::ceil(std::log(s.diameter) / ll - 1e-9));
    g.k_max = static_cast<int>(std::floor(std::log(guard * s.resolution) / ll + 1e-9));
    return g;
}

inline constexpr std::uint8_t kFlagEmpty = 1;
inline constexpr std::uint8_t kFlagApprox = 2;

struct BetaProfile {
    Point x;
    ScaleGrid grid;
    std::vector<double> beta;
    std::vector<std::uint8_t> flags;

    double at(int k) const { return beta[static_cast<std::size_t>(k - grid.k_min)]; }
};

// beta(x, lambda^k) over the grid; scales below the resolution guard are
// dropped from the fine end rather than reported as errors.
inline BetaProfile beta_profile(const TaggedSample& s, const Point& x, const ScaleGrid& grid,
                                const GeometryOptions& opt = {}, const Ball* within = nullptr) {
    BetaProfile p;
    p.x = x;
    p.grid = grid;
    p.grid.k_max = grid.k_min - 1;
    for (int k = grid.k_min; k <= grid.k_max; ++k) {
        const double r = grid.scale(k);
        if (r < opt.resolution_guard * s.resolution * (1.0 - 1e-12)) break;
        const auto b = beta_ball_ex(s, x, r, opt, within);
        p.beta.push_back(b.beta);
        p.flags.push_back(static_cast<std::uint8_t>((b.empty ? kFlagEmpty : 0) | (b.approximate ? kFlagApprox : 0)));
        p.grid.k_max = k;
    }
    return p;
}

// Riemann sum of beta^2 dt/t over the profile's window.
inline double beta_integral(const BetaProfile& p) {
    double s = 0.0;
    for (double b : p.beta) s += b * b;
    return p.grid.log_step() * s;
}

struct DensityEstimate {
    double value = 0.0;
    int k_lo = 0;
    int k_hi = -1;
    double threshold = 0.0;
    std::vector<double> prefix;   // fraction over the first n scales, coarse to fine
    std::vector<double> running;  // tail extreme of `prefix` (liminf / limsup surrogate)

    int window() const { return std::max(0, k_hi - k_lo + 1); }
};

namespace detail {

inline DensityEstimate density_from_flags(const std::vector<bool>& hit, int k_lo, double threshold, bool tail_min) {
    DensityEstimate d;
    d.threshold = threshold;
    d.k_lo = k_lo;
    d.k_hi = k_lo + static_cast<int>(hit.size()) - 1;
    std::size_t count = 0;
    for (std::size_t i = 0; i < hit.size(); ++i) {
        count += hit[i] ? 1 : 0;
        d.prefix.push_back(static_cast<double>(count) / static_cast<double>(i + 1));
    }
    d.value = hit.empty() ? 0.0 : static_cast<double>(count) / static_cast<double>(hit.size());
    d.running.assign(d.prefix.size(), 0.0);
    for (std::size_t i = d.prefix.size(); i-- > 0;) {
        const double v = d.prefix[i];
        if (i + 1 == d.prefix.size()) d.running[i] = v;
        else d.running[i] = tail_min ? std::min(v, d.running[i + 1]) : std::max(v, d.running[i + 1]);
    }
    return d;
}

}  // namespace detail

inline DensityEstimate wiggly_density(const BetaProfile& p, double beta0) {
    require(beta0 > 0.0 && beta0 < 1.0, "beta0 must lie in (0, 1)");
    std::vector<bool> hit;
    for (double b : p.beta) hit.push_back(b >= beta0);
    return detail::density_from_flags(hit, p.grid.k_min, beta0, true);
}

inline DensityEstimate flat_density(const BetaProfile& p, double beta0) {
    require(beta0 > 0.0 && beta0 < 1.0, "beta0 must lie in (0, 1)");
    std::vector<bool> hit;
    for (double b : p.beta) hit.push_back(b <= beta0);
    return detail::density_from_flags(hit, p.grid.k_min, beta0, false);
}

// Fraction of grid scales at which the sample is NOT eps-porous at x.
// Scales with eps * lambda^k < 2h are outside the probe's range and skipped.
inline DensityEstimate porosity_density(const TaggedSample& s, const Point& x, double eps, const ScaleGrid& grid) {
    std::vector<bool> hit;
    int k_lo = grid.k_min;
    bool started = false;
    for (int k = grid.k_min; k <= grid.k_max; ++k) {
        const double r = grid.scale(k);
        if (eps * r < 2.0 * s.resolution * (1.0 - 1e-12)) break;
        if (!started) {
            k_lo = k;
            started = true;
        }
        hit.push_back(!porosity_probe(s, x, r, eps).porous);
    }
    return detail::density_from_flags(hit, k_lo, eps, true);
}

struct ConvexProfile {
    Point x;
    ScaleGrid grid;
    std::vector<double> d;
    double integral = 0.0;
};

inline ConvexProfile convex_density_profile(const TaggedSample& s, const Point& x, const ScaleGrid& grid,
                                            const GeometryOptions& opt = {}) {
    ConvexProfile out;
    out.x = x;
    out.grid = grid;
    out.grid.k_max = grid.k_min - 1;
    double sum = 0.0;
    for (int k = grid.k_min; k <= grid.k_max; ++k) {
        const double r = grid.scale(k);
        if (r < opt.resolution_guard * s.resolution * (1.0 - 1e-12)) break;
        const double v = hull_diameter(s, x, r, opt) / (2.0 * r);
        out.d.push_back(v);
        sum += v * v;
        out.grid.k_max = k;
    }
    out.integral = grid.log_step() * sum;
    return out;
}

struct TspResult {
    double total = 0.0;
    std::vector<double> depth_terms;   // sum over squares of one depth
    std::vector<double> partial_sums;  // cumulative over depths 0..j
    int depth_used = -1;
};

// Sum of beta(Q)^2 |Q| over dyadic squares of Q0 up to max_depth. Depths
// whose side falls below the resolution guard are not evaluated. Squares
// whose tripled square misses the sample contribute zero and are skipped.
inline TspResult tsp_functional(const TaggedSample& s, const Point& root_corner, double root_side, int max_depth,
                                const GeometryOptions& opt = {}) {
    require(s.planar(), "tsp_functional needs a planar sample");
    TspResult out;
    double acc = 0.0;
    for (int j = 0; j <= max_depth; ++j) {
        const double side = std::ldexp(root_side, -j);
        if (side < opt.resolution_guard * s.resolution * (1.0 - 1e-12)) break;
        const long long n = 1LL << j;
        std::vector<long long> keys;
        keys.reserve(s.size());
        for (const auto& p : s.points) {
            const auto q = dyadic_square_containing(root_corner, root_side, j, p);
            for (long long dx = -1; dx <= 1; ++dx)
                for (long long dy = -1; dy <= 1; ++dy) {
                    const long long ix = q.ix + dx, iy = q.iy + dy;
                    if (ix >= 0 && iy >= 0 && ix < n && iy < n) keys.push_back(ix * n + iy);
                }
        }
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        std::vector<double> terms(keys.size(), 0.0);
        parallel_for(keys.size(), [&](std::size_t i) {
            DyadicSquare q{root_corner, root_side, j, keys[i] / n, keys[i] % n};
            const double b = beta_square(s, q, opt);
            terms[i] = b * b * side;
        });
        double level = 0.0;
        for (double t : terms) level += t;
        out.depth_terms.push_back(level);
        acc += level;
        out.partial_sums.push_back(acc);
        out.depth_used = j;
    }
    out.total = acc;
    return out;
}

// Sum of beta(Q)^2 over the dyadic squares containing x, one per depth.
inline double beta_sum_at_point(const TaggedSample& s, const Point& root_corner, double root_side, const Point& x,
                                int max_depth, const GeometryOptions& opt = {}) {
    require(s.planar(), "beta_sum_at_point needs a planar sample");
    double acc = 0.0;
    for (int j = 0; j <= max_depth; ++j) {
        const double side = std::ldexp(root_side, -j);
        if (side < opt.resolution_guard * s.resolution * (1.0 - 1e-12)) break;
        const double b = beta_square(s, dyadic_square_containing(root_corner, root_side, j, x), opt);
        acc += b * b;
    }
    return acc;
}

}  // namespace wiggly
