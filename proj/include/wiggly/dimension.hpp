#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corona.hpp"
#include "error.hpp"
#include "multiscale.hpp"
#include "parallel.hpp"
#include "sample.hpp"

namespace wiggly {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    std::size_t n = 0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit f;
    f.n = x.size();
    if (x.size() < 2) return f;
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (x.size() > 2) {
        double ss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = y[i] - f.intercept - f.slope * x[i];
            ss += e * e;
        }
        f.stderr_slope = std::sqrt(ss / (n - 2.0) / sxx);
    }
    return f;
}

struct BoxCount {
    int k = 0;
    double side = 0.0;
    std::size_t count = 0;
};

struct BoxDimension {
    double dim = 0.0;
    double stderr_dim = 0.0;
    std::vector<BoxCount> counts;
    int k_lo = 0;
    int k_hi = -1;
};

inline std::size_t occupied_boxes(const TaggedSample& s, double side) {
    Point lo = s.points[0];
    for (const auto& p : s.points)
        for (int a = 0; a < s.ambient_dim; ++a) lo[a] = std::min(lo[a], p[a]);
    std::vector<std::array<long long, 3>> keys;
    keys.reserve(s.size());
    for (const auto& p : s.points) {
        std::array<long long, 3> k{0, 0, 0};
        for (int a = 0; a < s.ambient_dim; ++a)
            k[static_cast<std::size_t>(a)] = static_cast<long long>(std::floor((p[a] - lo[a]) / side));
        keys.push_back(k);
    }
    std::sort(keys.begin(), keys.end());
    return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

// Slope of log N(lambda^k) against k log(1/lambda) over the grid scales
// with at least `min_count` occupied boxes (coarser scales are dominated by
// boundary effects).
inline BoxDimension box_dimension(const TaggedSample& s, const ScaleGrid& grid, std::size_t min_count = 32) {
    BoxDimension out;
    std::vector<BoxCount> all(static_cast<std::size_t>(grid.size()));
    parallel_for(all.size(), [&](std::size_t i) {
        const int k = grid.k_min + static_cast<int>(i);
        const double side = grid.scale(k);
        all[i] = BoxCount{k, side, occupied_boxes(s, side)};
    });
    for (const auto& c : all)
        if (c.count >= min_count) out.counts.push_back(c);
    if (out.counts.size() < 3) throw DataError("box_dimension needs at least 3 usable scales");
    out.k_lo = out.counts.front().k;
    out.k_hi = out.counts.back().k;
    std::vector<double> x, y;
    for (const auto& c : out.counts) {
        x.push_back(-std::log(c.side));
        y.push_back(std::log(static_cast<double>(c.count)));
    }
    const auto f = least_squares(x, y);
    out.dim = f.slope;
    out.stderr_dim = f.stderr_slope;
    return out;
}

// Box sides run down to `guard` * resolution. Below about 4h the count
// starts to see the sample's own spacing.
inline BoxDimension box_dimension(const TaggedSample& s, double lambda = 0.5, double guard = 4.0) {
    return box_dimension(s, make_scale_grid(s, lambda, guard));
}

struct LocalDimension {
    Point x;
    double slope = 0.0;
    double stderr_slope = 0.0;
    bool defined = false;
    std::vector<double> radii;
    std::vector<double> masses;
};

// Regression of log mu(B(x, r)) on log r for r = R lambda^j within
// [guard h, R / 8], restricted to the finest span + 1 of those radii (the
// limit is taken as r -> 0, and coarse radii see the set's own boundary).
inline LocalDimension local_dimension(const CoronaMeasure& mu, const TaggedSample& s, const Point& x,
                                      const GeometryOptions& geom = {}, int span = 5) {
    require(span >= 2, "local dimension span must be at least 2");
    LocalDimension out;
    out.x = x;
    const double lambda = mu.options.lambda;
    const double R = mu.seed.radius;
    const double lo = geom.resolution_guard * s.resolution * (1.0 - 1e-12);
    std::vector<double> radii;
    for (double r = R; r >= lo; r *= lambda)
        if (r <= R / 8.0 * (1.0 + 1e-12)) radii.push_back(r);
    if (radii.size() > static_cast<std::size_t>(span) + 1)
        radii.erase(radii.begin(), radii.end() - (span + 1));
    std::vector<double> lx, ly;
    for (double r : radii) {
        const double m = measure_query(mu, x, r);
        out.radii.push_back(r);
        out.masses.push_back(m);
        if (m > 0.0) {
            lx.push_back(std::log(r));
            ly.push_back(std::log(m));
        }
    }
    if (lx.empty()) throw DataError("local dimension: all masses are zero");
    if (lx.size() < 3 || ly.front() == ly.back()) return out;
    const auto f = least_squares(lx, ly);
    out.slope = f.slope;
    out.stderr_slope = f.stderr_slope;
    out.defined = true;
    return out;
}

struct MassBound {
    double value = 0.0;
    double quantile = 0.1;
    std::size_t atoms_used = 0;
    std::size_t undefined = 0;
    bool degenerate = false;
    std::vector<LocalDimension> local;
};

// Quantile of the local dimensions over an evenly strided subsample of the
// atoms (sorted by point index).
inline MassBound mass_bound(const CoronaMeasure& mu, const TaggedSample& s, double quantile = 0.1,
                            std::size_t max_atoms = 200, const GeometryOptions& geom = {}, int span = 5) {
    require(quantile >= 0.0 && quantile <= 1.0, "quantile must lie in [0, 1]");
    MassBound out;
    out.quantile = quantile;
    std::vector<std::uint32_t> pts;
    for (const auto& a : mu.atoms) pts.push_back(a.point);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 1) {
        out.degenerate = true;
        return out;
    }
    const std::size_t stride = std::max<std::size_t>(1, (pts.size() + max_atoms - 1) / max_atoms);
    std::vector<std::uint32_t> use;
    for (std::size_t i = 0; i < pts.size(); i += stride) use.push_back(pts[i]);
    out.local.resize(use.size());
    parallel_for(use.size(), [&](std::size_t i) { out.local[i] = local_dimension(mu, s, s.points[use[i]], geom, span); });
    std::vector<double> slopes;
    for (const auto& l : out.local) {
        if (l.defined) slopes.push_back(l.slope);
        else ++out.undefined;
    }
    out.atoms_used = use.size();
    if (slopes.empty()) {
        out.degenerate = true;
        return out;
    }
    std::sort(slopes.begin(), slopes.end());
    out.value = slopes[static_cast<std::size_t>(std::floor(quantile * static_cast<double>(slopes.size() - 1)))];
    return out;
}

struct BoundConstants {
    double c = 1.0;
    double c_prime = 1.0;
    double C = 1.0;
    std::optional<double> c_prime_upper;  // c' for the thm4 upper bound when fitted on its own
};

struct Measurements {
    std::optional<double> lambda;
    std::optional<double> beta0;
    std::optional<double> kappa_wiggly;
    std::optional<double> kappa_flat;
    std::optional<double> kappa_porous;  // non-porous density
    std::optional<double> eps;
    std::optional<double> ambient_dim;
    std::optional<double> d0;
};

struct BoundEntry {
    std::string id;
    std::string kind;  // "lower" or "upper"
    bool computed = false;
    double value = 0.0;
    std::string missing;
    std::map<std::string, double> inputs;
    std::optional<bool> consistent;  // against the box dimension when provided
};

inline std::vector<BoundEntry> theorem_bounds(const Measurements& m, const BoundConstants& k,
                                              std::optional<double> box_dim = std::nullopt) {
    std::vector<BoundEntry> out;
    auto entry = [&](const std::string& id, const std::string& kind,
                     std::vector<std::pair<std::string, std::optional<double>>> need, auto formula) {
        BoundEntry e;
        e.id = id;
        e.kind = kind;
        for (auto& [name, v] : need) {
            if (!v) {
                e.missing += (e.missing.empty() ? "" : ",") + name;
                continue;
            }
            e.inputs[name] = *v;
        }
        if (e.missing.empty()) {
            e.computed = true;
            e.value = formula(e.inputs);
            if (box_dim) e.consistent = kind == "lower" ? e.value <= *box_dim + 1e-12 : e.value >= *box_dim - 1e-12;
        }
        out.push_back(std::move(e));
    };
    using In = std::map<std::string, double>;
    entry("thm1", "lower", {{"beta0", m.beta0}}, [&](const In& v) { return 1.0 + k.c * v.at("beta0") * v.at("beta0"); });
    entry("thm3", "lower", {{"lambda", m.lambda}, {"beta0", m.beta0}, {"kappa", m.kappa_wiggly}}, [&](const In& v) {
        return 1.0 + k.c_prime * std::pow(v.at("lambda"), 4) * v.at("beta0") * v.at("beta0") * v.at("kappa");
    });
    entry("thm4", "upper", {{"lambda", m.lambda}, {"beta0", m.beta0}, {"kappa", m.kappa_flat}}, [&](const In& v) {
        const double cp = k.c_prime_upper.value_or(k.c_prime);
        const double kap = v.at("kappa");
        return 1.0 + cp * std::pow(v.at("lambda"), -4) * (1.0 - kap + v.at("beta0") * v.at("beta0") * kap);
    });
    entry("thm5", "lower", {{"kappa", m.kappa_porous}, {"d", m.ambient_dim}, {"eps", m.eps}}, [&](const In& v) {
        return 1.0 + v.at("kappa") * (v.at("d") - 1.0 - k.C / std::abs(std::log(v.at("eps"))));
    });
    entry("thm7", "lower", {{"d0", m.d0}}, [&](const In& v) { return k.c * v.at("d0") * v.at("d0"); });
    entry("thm9", "upper", {{"d0", m.d0}}, [&](const In& v) { return k.c * v.at("d0") * v.at("d0"); });
    return out;
}

struct CalibrationCase {
    std::string name;
    Measurements m;
    double box_dim = 0.0;
};

struct Calibration {
    BoundConstants constants;
    std::map<std::string, std::string> binding_case;  // constant -> case that fixed it
};

// Largest c, c' keeping the thm1/thm3/thm7 lower bounds at or below the box
// dimension on every case, and the smallest c' keeping thm4 above it.
inline Calibration calibrate_constants(const std::vector<CalibrationCase>& cases) {
    Calibration cal;
    double c1 = INFINITY, c3 = INFINITY, c4 = 0.0, c7 = INFINITY;
    for (const auto& cs : cases) {
        const auto& m = cs.m;
        const double excess = cs.box_dim - 1.0;
        if (m.beta0 && *m.beta0 > 0.0) {
            const double v = excess / (*m.beta0 * *m.beta0);
            if (v < c1) {
                c1 = v;
                cal.binding_case["c_thm1"] = cs.name;
            }
        }
        if (m.lambda && m.beta0 && m.kappa_wiggly && *m.kappa_wiggly > 0.0) {
            const double v = excess / (std::pow(*m.lambda, 4) * *m.beta0 * *m.beta0 * *m.kappa_wiggly);
            if (v < c3) {
                c3 = v;
                cal.binding_case["c_prime"] = cs.name;
            }
        }
        if (m.lambda && m.beta0 && m.kappa_flat) {
            const double base = std::pow(*m.lambda, -4) * (1.0 - *m.kappa_flat + *m.beta0 * *m.beta0 * *m.kappa_flat);
            if (base > 0.0 && excess / base > c4) {
                c4 = excess / base;
                cal.binding_case["c_prime_upper"] = cs.name;
            }
        }
        if (m.d0 && *m.d0 > 0.0) {
            const double v = cs.box_dim / (*m.d0 * *m.d0);
            if (v < c7) {
                c7 = v;
                cal.binding_case["c_thm7"] = cs.name;
            }
        }
    }
    auto fin = [](double v) { return std::isfinite(v) ? std::max(v, 0.0) : 1.0; };
    cal.constants.c = std::min(fin(c1), fin(c7));
    cal.constants.c_prime = fin(c3);
    cal.constants.c_prime_upper = c4;
    return cal;
}

}  // namespace wiggly
