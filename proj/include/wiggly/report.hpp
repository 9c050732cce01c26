#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "core_geometry.hpp"
#include "corona.hpp"
#include "dataset.hpp"
#include "dimension.hpp"
#include "error.hpp"
#include "multiscale.hpp"
#include "parallel.hpp"

namespace wiggly {

using json = nlohmann::json;

struct AnalyzeOptions {
    bool beta = false;
    bool density = false;
    bool porosity = false;
    bool convex = false;
    bool corona = false;
    bool dimension = false;

    double lambda = 0.5;
    double M = 4.0 * std::numbers::ln10;
    double beta0 = 0.05;
    double eps = 0.01;
    double porosity_eps = 0.1;
    int n_max = 6;
    Variant variant = Variant::universal;
    std::size_t points = 64;
    std::size_t probes = 1000;
    double resolution_guard = 10.0;
    double box_guard = 4.0;
    BoundConstants constants;

    void all() { beta = density = porosity = convex = corona = dimension = true; }
    bool any() const { return beta || density || porosity || convex || corona || dimension; }
};

// Up to n sample points, evenly strided through the lexicographic order.
inline std::vector<std::uint32_t> base_points(const TaggedSample& s, std::size_t n) {
    std::vector<std::uint32_t> out;
    const auto& order = s.index->lex_order;
    if (n == 0) return out;
    if (n >= order.size()) return order;
    for (std::size_t i = 0; i < n; ++i) out.push_back(order[(i * (order.size() - 1)) / std::max<std::size_t>(1, n - 1)]);
    return out;
}

inline json point_json(const Point& p, int dim) {
    json a = json::array();
    for (int i = 0; i < dim; ++i) a.push_back(p[static_cast<std::size_t>(i)]);
    return a;
}

inline json window_json(const ScaleGrid& g) { return {{"lambda", g.lambda}, {"k_min", g.k_min}, {"k_max", g.k_max}}; }

inline json density_json(const DensityEstimate& d) {
    return {{"value", d.value}, {"k_lo", d.k_lo}, {"k_hi", d.k_hi}, {"threshold", d.threshold}, {"running", d.running}};
}

namespace detail {

struct Summary {
    double mean = 0.0, min = 0.0, max = 0.0;
};

inline Summary summarize(const std::vector<double>& v) {
    Summary s;
    if (v.empty()) return s;
    s.min = s.max = v.front();
    for (double x : v) {
        s.mean += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean /= static_cast<double>(v.size());
    return s;
}

inline json summary_json(const std::vector<double>& v) {
    const auto s = summarize(v);
    return {{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"n", v.size()}};
}

}  // namespace detail

inline json corona_json(const CoronaMeasure& mu, const TaggedSample& s, const StructureCheck& st, const ScalingAudit& au) {
    const int dim = s.ambient_dim;
    json nodes = json::array();
    for (std::size_t i = 0; i < mu.nodes.size(); ++i) {
        const auto& n = mu.nodes[i];
        nodes.push_back({{"id", i},
                         {"center", point_json(n.ball.center, dim)},
                         {"radius", n.ball.radius},
                         {"level", n.level},
                         {"parent", n.parent},
                         {"kind", kind_name(n.kind)},
                         {"mass", n.mass},
                         {"children", n.children},
                         {"kb_count", n.kb_count},
                         {"z_count", n.z_count},
                         {"z_length", n.z_length},
                         {"z_e_weight", n.z_e_weight},
                         {"net_size", n.net_size},
                         {"sum_t", n.sum_t},
                         {"pass10", n.pass10},
                         {"pass23", n.pass23},
                         {"e_total", n.e_total}});
    }
    json probes = json::array();
    for (const auto& p : au.probes)
        probes.push_back({{"x", point_json(p.x, dim)}, {"r", p.r}, {"mu", p.mu}, {"integral", p.integral}});
    json structure = {{"level_mass", st.level_mass},
                      {"max_mass_error", st.max_mass_error},
                      {"overlap_same_level", st.overlap_same_level},
                      {"overlap_parent_child", st.overlap_parent_child},
                      {"overlap_child_parent", st.overlap_child_parent},
                      {"not_contained", st.not_contained},
                      {"not_contained_2x", st.not_contained_2x},
                      {"max_radius_ratio", st.max_radius_ratio},
                      {"max_density_ratio", st.max_density_ratio},
                      {"child_mass_excess", st.child_mass_excess},
                      {"balls", st.balls}};
    json audit = {{"R", au.R},
                  {"C", au.C},
                  {"C_unnormalized", au.C_unnormalized},
                  {"C_prime", au.C_prime},
                  {"C_env", au.C_env},
                  {"C_prime_same_C", au.C_prime_same_C},
                  {"integral_constant", au.integral_constant},
                  {"violations_linear", au.violations_linear},
                  {"violations_envelope", au.violations_envelope},
                  {"probes", probes}};
    return {{"variant", variant_name(mu.options.variant)},
            {"seed", {{"center", point_json(mu.seed.center, dim)}, {"radius", mu.seed.radius}}},
            {"depth", mu.depth},
            {"window", {{"lambda", mu.options.lambda}, {"r_min", mu.options.geom.resolution_guard * s.resolution}, {"r_max", mu.seed.radius}}},
            {"tolerance", 1e-12},
            {"nodes", nodes},
            {"atom_count", mu.atoms.size()},
            {"total_mass", mu.total_mass()},
            {"atom_e_weight", mu.atom_e_weight(s)},
            {"structure", structure},
            {"audit", audit}};
}

// Runs the requested analyses. Everything written is a function of the
// dataset and the options, so reports are reproducible byte for byte.
inline json analyze(const Dataset& d, const AnalyzeOptions& o) {
    const auto& s = d.sample;
    require(o.lambda > 0.0 && o.lambda < 1.0, "lambda must lie in (0, 1)");
    require(o.beta0 > 0.0 && o.beta0 < 1.0, "beta0 must lie in (0, 1)");
    require(o.eps > 0.0 && o.eps <= 0.01 + 1e-15, "eps must lie in (0, 1/100]");
    require(o.porosity_eps > 0.0 && o.porosity_eps < 0.5, "porosity eps must lie in (0, 1/2)");
    require(o.M > 0.0, "M must be positive");
    const int dim = s.ambient_dim;
    GeometryOptions geom{o.resolution_guard};
    const auto grid = make_scale_grid(s, o.lambda, o.resolution_guard);
    const auto pts = base_points(s, o.points);

    json r;
    r["format"] = "wiggly-report";
    r["version"] = 1;
    r["dataset"] = {{"family", d.family},
                    {"count", s.size()},
                    {"resolution", s.resolution},
                    {"ambient_dim", dim},
                    {"diameter", s.diameter},
                    {"ground_truth", d.truth}};
    r["parameters"] = {{"lambda", o.lambda},
                       {"M", o.M},
                       {"beta0", o.beta0},
                       {"eps", o.eps},
                       {"porosity_eps", o.porosity_eps},
                       {"n_max", o.n_max},
                       {"variant", variant_name(o.variant)},
                       {"points", pts.size()},
                       {"probes", o.probes},
                       {"resolution_guard", o.resolution_guard},
                       {"box_guard", o.box_guard}};

    Measurements meas;
    meas.lambda = o.lambda;
    meas.beta0 = o.beta0;
    meas.ambient_dim = static_cast<double>(dim);
    meas.eps = o.porosity_eps;

    std::vector<BetaProfile> profiles;
    if (o.beta || o.density) {
        profiles.resize(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) { profiles[i] = beta_profile(s, s.points[pts[i]], grid, geom); });
    }
    if (o.beta) {
        json list = json::array();
        for (const auto& p : profiles) {
            list.push_back({{"x", point_json(p.x, dim)},
                            {"k_min", p.grid.k_min},
                            {"k_max", p.grid.k_max},
                            {"beta", p.beta},
                            {"flags", p.flags},
                            {"integral", beta_integral(p)}});
        }
        r["betas"] = {{"window", window_json(grid)}, {"tolerance", 1.0 / o.resolution_guard}, {"points", list}};
    }
    if (o.density) {
        json list = json::array();
        std::vector<double> wv, fv;
        for (const auto& p : profiles) {
            const auto w = wiggly_density(p, o.beta0);
            const auto f = flat_density(p, o.beta0);
            wv.push_back(w.value);
            fv.push_back(f.value);
            list.push_back({{"x", point_json(p.x, dim)}, {"wiggly", density_json(w)}, {"flat", density_json(f)}});
        }
        meas.kappa_wiggly = detail::summarize(wv).min;
        meas.kappa_flat = detail::summarize(fv).min;
        r["densities"] = {{"window", window_json(grid)},
                          {"tolerance", 1.0 / o.resolution_guard},
                          {"beta0", o.beta0},
                          {"points", list},
                          {"wiggly", detail::summary_json(wv)},
                          {"flat", detail::summary_json(fv)}};
    }
    if (o.porosity) {
        std::vector<DensityEstimate> ds(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) { ds[i] = porosity_density(s, s.points[pts[i]], o.porosity_eps, grid); });
        json list = json::array();
        std::vector<double> v;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds[i].window() > 0) v.push_back(ds[i].value);
            list.push_back({{"x", point_json(s.points[pts[i]], dim)}, {"non_porous", density_json(ds[i])}});
        }
        if (!v.empty()) meas.kappa_porous = detail::summarize(v).min;
        r["porosity"] = {{"window", window_json(grid)},
                         {"tolerance", 0.5},
                         {"eps", o.porosity_eps},
                         {"points", list},
                         {"non_porous", detail::summary_json(v)}};
    }
    if (o.convex) {
        std::vector<ConvexProfile> cs(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) { cs[i] = convex_density_profile(s, s.points[pts[i]], grid, geom); });
        json list = json::array();
        std::vector<double> all;
        for (const auto& c : cs) {
            for (double v : c.d) all.push_back(v);
            list.push_back(
                {{"x", point_json(c.x, dim)}, {"k_min", c.grid.k_min}, {"k_max", c.grid.k_max}, {"d", c.d}, {"integral", c.integral}});
        }
        if (!all.empty()) meas.d0 = detail::summarize(all).min;
        r["convex"] = {{"window", window_json(grid)}, {"tolerance", 1.0 / o.resolution_guard}, {"points", list}, {"d", detail::summary_json(all)}};
    }

    std::optional<CoronaMeasure> mu;
    if (o.corona || o.dimension) {
        CoronaOptions co;
        co.variant = o.variant;
        co.M = o.M;
        co.eps = o.eps;
        co.n_max = o.n_max;
        co.lambda = o.lambda;
        co.geom = geom;
        mu = build_corona(s, co);
    }
    if (o.corona) {
        const auto st = verify_structure(*mu, dim);
        const auto au = scaling_audit(*mu, s, o.probes, 12345, geom);
        r["corona"] = corona_json(*mu, s, st, au);
    }
    if (o.dimension) {
        const auto box = box_dimension(s, o.lambda, o.box_guard);
        json counts = json::array();
        for (const auto& c : box.counts) counts.push_back({{"k", c.k}, {"side", c.side}, {"count", c.count}});
        const auto mb = mass_bound(*mu, s, 0.1, 200, geom);
        json locals = json::array();
        for (const auto& l : mb.local)
            locals.push_back({{"x", point_json(l.x, dim)}, {"slope", l.slope}, {"stderr", l.stderr_slope}, {"defined", l.defined}});
        json bounds = json::array();
        for (const auto& b : theorem_bounds(meas, o.constants, box.dim)) {
            json inputs = json::object();
            for (const auto& [k, v] : b.inputs) inputs[k] = v;
            bounds.push_back({{"id", b.id},
                              {"kind", b.kind},
                              {"computed", b.computed},
                              {"value", b.computed ? json(b.value) : json(nullptr)},
                              {"missing", b.missing},
                              {"inputs", inputs},
                              {"consistent", b.consistent ? json(*b.consistent) : json(nullptr)}});
        }
        json constants = {{"c", o.constants.c}, {"c_prime", o.constants.c_prime}, {"C", o.constants.C}};
        constants["c_prime_upper"] = o.constants.c_prime_upper ? json(*o.constants.c_prime_upper) : json(nullptr);
        r["dimension"] = {
            {"box", {{"dim", box.dim},
                     {"stderr", box.stderr_dim},
                     {"k_lo", box.k_lo},
                     {"k_hi", box.k_hi},
                     {"counts", counts},
                     {"window", {{"lambda", o.lambda}, {"k_lo", box.k_lo}, {"k_hi", box.k_hi}}},
                     {"tolerance", box.stderr_dim}}},
            {"mass_bound", {{"value", mb.value},
                            {"quantile", mb.quantile},
                            {"atoms_used", mb.atoms_used},
                            {"undefined", mb.undefined},
                            {"degenerate", mb.degenerate},
                            {"window", {{"r_min", o.resolution_guard * s.resolution}, {"r_max", mu->seed.radius / 8.0}}},
                            {"tolerance", 0.1}}},
            {"local_dims", locals},
            {"bounds", bounds},
            {"constants", constants}};
    }
    return r;
}

// ---------------------------------------------------------------------------
// Schema validation. The schema language is a small subset of JSON Schema:
// "type" (string or list), "properties", "required", "items", and objects
// reject properties they do not list.

namespace schema {

inline json num() { return {{"type", "number"}}; }
inline json integer() { return {{"type", "integer"}}; }
inline json str() { return {{"type", "string"}}; }
inline json boolean() { return {{"type", "boolean"}}; }
inline json nullable(json s) {
    s["type"] = json::array({s["type"], "null"});
    return s;
}
inline json arr(json items) { return {{"type", "array"}, {"items", std::move(items)}}; }
inline json any_object() { return {{"type", "object"}, {"open", true}}; }
inline json obj(std::vector<std::pair<std::string, json>> props, std::vector<std::string> required = {}) {
    json p = json::object();
    for (auto& [k, v] : props) p[k] = std::move(v);
    if (required.empty())
        for (auto& [k, v] : p.items()) required.push_back(k);
    return {{"type", "object"}, {"properties", p}, {"required", required}};
}

inline json density() {
    return obj({{"value", num()}, {"k_lo", integer()}, {"k_hi", integer()}, {"threshold", num()}, {"running", arr(num())}});
}
inline json summary() { return obj({{"mean", num()}, {"min", num()}, {"max", num()}, {"n", integer()}}); }
inline json window() { return obj({{"lambda", num()}, {"k_min", integer()}, {"k_max", integer()}}); }
inline json point() { return arr(num()); }

inline const json& report() {
    static const json s = [] {
        json node = obj({{"id", integer()},        {"center", point()},     {"radius", num()},      {"level", integer()},
                         {"parent", integer()},    {"kind", str()},         {"mass", num()},        {"children", arr(integer())},
                         {"kb_count", integer()},  {"z_count", integer()},  {"z_length", num()},    {"z_e_weight", num()},
                         {"net_size", integer()},  {"sum_t", num()},        {"pass10", boolean()},  {"pass23", boolean()},
                         {"e_total", num()}});
        json corona = obj({{"variant", str()},
                           {"seed", obj({{"center", point()}, {"radius", num()}})},
                           {"depth", integer()},
                           {"window", obj({{"lambda", num()}, {"r_min", num()}, {"r_max", num()}})},
                           {"tolerance", num()},
                           {"nodes", arr(node)},
                           {"atom_count", integer()},
                           {"total_mass", num()},
                           {"atom_e_weight", num()},
                           {"structure", obj({{"level_mass", arr(num())},
                                              {"max_mass_error", num()},
                                              {"overlap_same_level", integer()},
                                              {"overlap_parent_child", integer()},
                                              {"overlap_child_parent", integer()},
                                              {"not_contained", integer()},
                                              {"not_contained_2x", integer()},
                                              {"max_radius_ratio", num()},
                                              {"max_density_ratio", num()},
                                              {"child_mass_excess", integer()},
                                              {"balls", integer()}})},
                           {"audit", obj({{"R", num()},
                                          {"C", num()},
                                          {"C_unnormalized", num()},
                                          {"C_prime", num()},
                                          {"C_env", num()},
                                          {"C_prime_same_C", num()},
                                          {"integral_constant", boolean()},
                                          {"violations_linear", integer()},
                                          {"violations_envelope", integer()},
                                          {"probes", arr(obj({{"x", point()}, {"r", num()}, {"mu", num()}, {"integral", num()}}))}})}});
        json bound = obj({{"id", str()},
                          {"kind", str()},
                          {"computed", boolean()},
                          {"value", nullable(num())},
                          {"missing", str()},
                          {"inputs", {{"type", "object"}, {"additional", num()}}},
                          {"consistent", nullable(boolean())}});
        json dimension = obj(
            {{"box", obj({{"dim", num()},
                          {"stderr", num()},
                          {"k_lo", integer()},
                          {"k_hi", integer()},
                          {"counts", arr(obj({{"k", integer()}, {"side", num()}, {"count", integer()}}))},
                          {"window", obj({{"lambda", num()}, {"k_lo", integer()}, {"k_hi", integer()}})},
                          {"tolerance", num()}})},
             {"mass_bound", obj({{"value", num()},
                                 {"quantile", num()},
                                 {"atoms_used", integer()},
                                 {"undefined", integer()},
                                 {"degenerate", boolean()},
                                 {"window", obj({{"r_min", num()}, {"r_max", num()}})},
                                 {"tolerance", num()}})},
             {"local_dims", arr(obj({{"x", point()}, {"slope", num()}, {"stderr", num()}, {"defined", boolean()}}))},
             {"bounds", arr(bound)},
             {"constants", obj({{"c", num()}, {"c_prime", num()}, {"C", num()}, {"c_prime_upper", nullable(num())}})}});
        return obj(
            {{"format", str()},
             {"version", integer()},
             {"dataset", obj({{"family", str()},
                              {"count", integer()},
                              {"resolution", num()},
                              {"ambient_dim", integer()},
                              {"diameter", num()},
                              {"ground_truth", any_object()}})},
             {"parameters", obj({{"lambda", num()},
                                 {"M", num()},
                                 {"beta0", num()},
                                 {"eps", num()},
                                 {"porosity_eps", num()},
                                 {"n_max", integer()},
                                 {"variant", str()},
                                 {"points", integer()},
                                 {"probes", integer()},
                                 {"resolution_guard", num()},
                                 {"box_guard", num()}})},
             {"betas", obj({{"window", window()},
                            {"tolerance", num()},
                            {"points", arr(obj({{"x", point()},
                                                {"k_min", integer()},
                                                {"k_max", integer()},
                                                {"beta", arr(num())},
                                                {"flags", arr(integer())},
                                                {"integral", num()}}))}})},
             {"densities", obj({{"window", window()},
                                {"tolerance", num()},
                                {"beta0", num()},
                                {"points", arr(obj({{"x", point()}, {"wiggly", density()}, {"flat", density()}}))},
                                {"wiggly", summary()},
                                {"flat", summary()}})},
             {"porosity", obj({{"window", window()},
                               {"tolerance", num()},
                               {"eps", num()},
                               {"points", arr(obj({{"x", point()}, {"non_porous", density()}}))},
                               {"non_porous", summary()}})},
             {"convex", obj({{"window", window()},
                             {"tolerance", num()},
                             {"points", arr(obj({{"x", point()},
                                                 {"k_min", integer()},
                                                 {"k_max", integer()},
                                                 {"d", arr(num())},
                                                 {"integral", num()}}))},
                             {"d", summary()}})},
             {"corona", corona},
             {"dimension", dimension}},
            {"format", "version", "dataset", "parameters"});
    }();
    return s;
}

inline bool type_ok(const json& v, const std::string& t) {
    if (t == "number") return v.is_number();
    if (t == "integer") return v.is_number_integer();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "array") return v.is_array();
    if (t == "object") return v.is_object();
    if (t == "null") return v.is_null();
    return false;
}

inline void validate(const json& v, const json& s, const std::string& path, std::vector<std::string>& errors) {
    const auto& t = s.at("type");
    bool ok = false;
    if (t.is_array()) {
        for (const auto& x : t) ok = ok || type_ok(v, x.get<std::string>());
    } else {
        ok = type_ok(v, t.get<std::string>());
    }
    if (!ok) {
        errors.push_back(path + ": expected " + t.dump());
        return;
    }
    if (v.is_array() && s.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i) validate(v[i], s["items"], path + "[" + std::to_string(i) + "]", errors);
    if (!v.is_object() || s.value("open", false)) return;
    if (s.contains("additional")) {
        for (const auto& [k, x] : v.items()) validate(x, s["additional"], path + "." + k, errors);
        return;
    }
    const auto& props = s.contains("properties") ? s["properties"] : json::object();
    for (const auto& [k, x] : v.items()) {
        if (!props.contains(k)) {
            errors.push_back(path + "." + k + ": unknown field");
            continue;
        }
        validate(x, props[k], path + "." + k, errors);
    }
    if (s.contains("required"))
        for (const auto& k : s["required"])
            if (!v.contains(k.get<std::string>())) errors.push_back(path + "." + k.get<std::string>() + ": missing");
}

}  // namespace schema

// Empty when the report conforms; otherwise one message per problem.
inline std::vector<std::string> validate_report(const json& r) {
    std::vector<std::string> errors;
    schema::validate(r, schema::report(), "$", errors);
    return errors;
}

}  // namespace wiggly
