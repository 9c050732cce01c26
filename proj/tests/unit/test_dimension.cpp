#include <gtest/gtest.h>

#include "common.hpp"

using namespace wiggly;
using testing_util::make;

TEST(LeastSquares, ExactLine) {
    const auto f = least_squares({0.0, 1.0, 2.0, 3.0}, {1.0, 3.5, 6.0, 8.5});
    EXPECT_NEAR(f.slope, 2.5, 1e-12);
    EXPECT_NEAR(f.intercept, 1.0, 1e-12);
    EXPECT_NEAR(f.stderr_slope, 0.0, 1e-12);
    EXPECT_EQ(f.n, 4u);
}

TEST(BoxDimension, Segment) { EXPECT_NEAR(box_dimension(make("segment", 14).sample).dim, 1.0, 0.02); }

TEST(BoxDimension, Circle) { EXPECT_NEAR(box_dimension(make("circle", 14).sample).dim, 1.0, 0.02); }

TEST(BoxDimension, CantorThird) {
    EXPECT_NEAR(box_dimension(make("cantor_third", 14).sample).dim, std::log(2.0) / std::log(3.0), 0.03);
}

TEST(BoxDimension, Koch) {
    const auto b = box_dimension(make("koch", 8).sample);
    EXPECT_NEAR(b.dim, std::log(4.0) / std::log(3.0), 0.05);
    EXPECT_GE(b.counts.size(), 3u);
    for (std::size_t i = 1; i < b.counts.size(); ++i) EXPECT_GE(b.counts[i].count, b.counts[i - 1].count);
    EXPECT_GE(b.dim, 0.0);
    EXPECT_LE(b.dim, 2.0);
}

TEST(LocalDimension, SegmentLengthMeasure) {
    const auto g = make("segment", 12);
    const auto mu = build_corona(g.sample, CoronaOptions{});
    for (double x : {0.3, 0.5, 0.71}) {
        const auto l = local_dimension(mu, g.sample, {x, 0.0});
        ASSERT_TRUE(l.defined);
        EXPECT_NEAR(l.slope, 1.0, 0.05);
        EXPECT_EQ(l.radii.size(), 6u);
    }
    EXPECT_THROW(local_dimension(mu, g.sample, {0.5, 0.0}, {}, 1), DataError);
}

TEST(LocalDimension, IsolatedAtomUndefined) {
    const auto s = make_sample({{0.0, 0.0}, {1.0, 0.0}}, 0.001);
    CoronaMeasure mu;
    mu.seed = Ball{{0.0, 0.0}, 1.0};
    mu.atoms = {Atom{0, 0.5, 0}, Atom{1, 0.5, 0}};
    detail::finish_index(mu, s);
    const auto l = local_dimension(mu, s, {0.0, 0.0});
    EXPECT_FALSE(l.defined);
    EXPECT_FALSE(l.radii.empty());
}

TEST(MassBound, Segment) {
    const auto g = make("segment", 14);
    const auto mu = build_corona(g.sample, CoronaOptions{});
    const auto m = mass_bound(mu, g.sample);
    EXPECT_FALSE(m.degenerate);
    EXPECT_NEAR(m.value, 1.0, 0.05);
    EXPECT_LE(m.value, box_dimension(g.sample).dim + 0.05);
}

TEST(MassBound, KochSuperLinear) {
    const auto g = make("koch", 6);
    const auto mu = build_corona(g.sample, CoronaOptions{});
    const auto m = mass_bound(mu, g.sample);
    EXPECT_GT(m.value, 1.0);
    std::size_t big = 0, defined = 0;
    for (const auto& l : m.local)
        if (l.defined) {
            ++defined;
            big += l.slope >= 1.05 ? 1 : 0;
        }
    ASSERT_GT(defined, 0u);
    EXPECT_GE(static_cast<double>(big), 0.9 * static_cast<double>(defined));
}

TEST(MassBound, SingleAtomDegenerate) {
    const auto s = make_sample({{0.0, 0.0}, {1.0, 0.0}}, 0.001);
    CoronaMeasure mu;
    mu.seed = Ball{{0.0, 0.0}, 1.0};
    mu.atoms = {Atom{1, 1.0, 0}};
    detail::finish_index(mu, s);
    EXPECT_TRUE(mass_bound(mu, s).degenerate);
}

namespace {

const BoundEntry& find(const std::vector<BoundEntry>& v, const std::string& id) {
    for (const auto& e : v)
        if (e.id == id) return e;
    throw std::runtime_error("missing bound " + id);
}

}  // namespace

TEST(TheoremBounds, TrivialCases) {
    Measurements m;
    m.lambda = 0.5;
    m.beta0 = 0.0;
    m.kappa_wiggly = 0.0;
    const auto b = theorem_bounds(m, BoundConstants{});
    EXPECT_DOUBLE_EQ(find(b, "thm1").value, 1.0);
    EXPECT_DOUBLE_EQ(find(b, "thm3").value, 1.0);
    m.beta0 = 0.3;
    EXPECT_DOUBLE_EQ(find(theorem_bounds(m, BoundConstants{}), "thm3").value, 1.0);
}

TEST(TheoremBounds, KochNumbers) {
    Measurements m;
    m.lambda = 0.5;
    m.beta0 = 0.05;
    m.kappa_wiggly = 1.0;
    const double box = std::log(4.0) / std::log(3.0);
    const auto b = theorem_bounds(m, BoundConstants{}, box);
    const auto& t3 = find(b, "thm3");
    ASSERT_TRUE(t3.computed);
    EXPECT_NEAR(t3.value, 1.0 + 0.0025 / 16.0, 1e-12);
    EXPECT_NEAR(t3.value, 1.000156, 1e-6);
    EXPECT_EQ(t3.kind, "lower");
    ASSERT_TRUE(t3.consistent.has_value());
    EXPECT_TRUE(*t3.consistent);
    EXPECT_EQ(t3.inputs.at("kappa"), 1.0);
}

TEST(TheoremBounds, MissingInputsReported) {
    Measurements m;
    m.d0 = 0.25;
    const auto b = theorem_bounds(m, BoundConstants{2.0, 1.0, 1.0, std::nullopt});
    EXPECT_FALSE(find(b, "thm1").computed);
    EXPECT_EQ(find(b, "thm3").missing, "lambda,beta0,kappa");
    EXPECT_DOUBLE_EQ(find(b, "thm7").value, 0.125);
    EXPECT_DOUBLE_EQ(find(b, "thm9").value, 0.125);
    EXPECT_EQ(find(b, "thm9").kind, "upper");
}

TEST(TheoremBounds, FlatAndPorousFormulas) {
    Measurements m;
    m.lambda = 0.5;
    m.beta0 = 0.1;
    m.kappa_flat = 1.0;
    m.kappa_porous = 0.5;
    m.ambient_dim = 2.0;
    m.eps = 0.1;
    const auto b = theorem_bounds(m, BoundConstants{});
    EXPECT_NEAR(find(b, "thm4").value, 1.0 + 16.0 * 0.01, 1e-12);
    EXPECT_NEAR(find(b, "thm5").value, 1.0 + 0.5 * (1.0 - 1.0 / std::log(10.0)), 1e-12);
    BoundConstants k;
    k.c_prime_upper = 2.0;
    EXPECT_NEAR(find(theorem_bounds(m, k), "thm4").value, 1.0 + 32.0 * 0.01, 1e-12);
}

// thm9 shares c with thm7 but points the other way; only the fitted bounds are checked.
TEST(Calibration, KeepsBoundsConsistent) {
    std::vector<CalibrationCase> cases;
    Measurements koch;
    koch.lambda = 0.5;
    koch.beta0 = 0.05;
    koch.kappa_wiggly = 1.0;
    koch.kappa_flat = 0.0;
    koch.d0 = 0.5;
    cases.push_back({"koch", koch, std::log(4.0) / std::log(3.0)});
    Measurements seg = koch;
    seg.kappa_wiggly = 0.2;
    seg.kappa_flat = 1.0;
    seg.d0 = 1.0;
    cases.push_back({"seg", seg, 1.0});
    const auto cal = calibrate_constants(cases);
    for (const auto& cs : cases)
        for (const auto& e : theorem_bounds(cs.m, cal.constants, cs.box_dim))
            if (e.computed && e.id != "thm9") EXPECT_TRUE(e.consistent.value_or(true)) << cs.name << " " << e.id;
}
