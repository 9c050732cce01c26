#include <gtest/gtest.h>

#include "common.hpp"

using namespace wiggly;
using testing_util::make;

TEST(StoppingScale, SegmentNeverStops) {
    const auto g = make("segment", 10);
    const Ball B{{0.5, 0.0}, 0.5};
    for (double x : {0.1, 0.5, 0.77}) {
        const auto st = stopping_scale(g.sample, B, {x, 0.0}, 4.0 * std::log(10.0));
        EXPECT_EQ(st.t, 0.0);
        EXPECT_NEAR(st.integral, 0.0, 1e-12);
    }
}

TEST(StoppingScale, KochSmallBudgetStopsEverywhere) {
    const auto g = make("koch", 7);
    const Ball B{{0.5, 0.0}, 0.6};
    for (std::size_t i = 0; i < g.sample.size(); i += 1001) {
        const auto st = stopping_scale(g.sample, B, g.sample.points[i], 0.1 * std::log(2.0));
        EXPECT_GT(st.t, 0.0);
        EXPECT_LT(st.t, B.radius);
    }
}

TEST(StoppingScale, MonotoneInBudget) {
    const auto g = make("koch", 7);
    const Ball B{{0.5, 0.0}, 0.6};
    const Point x = g.sample.points[5000];
    double last = INFINITY;
    for (double M : {0.01, 0.05, 0.2, 1.0}) {
        const double t = stopping_scale(g.sample, B, x, M).t;
        EXPECT_LE(t, last);
        last = t;
    }
}

TEST(StoppingScale, RejectsBadArguments) {
    const auto g = make("segment", 6);
    EXPECT_THROW(stopping_scale(g.sample, Ball{{0.5, 0.0}, 0.5}, {0.5, 0.0}, 0.0), DataError);
    EXPECT_THROW(stopping_scale(g.sample, Ball{{5.0, 5.0}, 0.5}, {5.0, 5.0}, 1.0), DataError);
}

TEST(WigglySplit, SegmentIsAllCore) {
    const auto g = make("segment", 10);
    const auto sp = wiggly_split(g.sample, Ball{{0.5, 0.0}, 0.5}, 4.0 * std::log(10.0));
    EXPECT_EQ(sp.z.size(), sp.kb.size());
    EXPECT_TRUE(sp.w.empty());
    EXPECT_NEAR(sp.z_length, 1.0, 2.0 * g.sample.resolution);
}

TEST(WigglySplit, KochSmallBudgetHasEmptyCore) {
    const auto g = make("koch", 7);
    const auto sp = wiggly_split(g.sample, Ball{{0.5, 0.0}, 0.6}, 0.1 * std::log(2.0));
    EXPECT_TRUE(sp.z.empty());
    EXPECT_EQ(sp.w.size(), sp.kb.size());
}

TEST(SelectNet, SmallCases) {
    EXPECT_EQ(select_net({{0.3, 0.4}}, {0.1}), std::vector<std::size_t>{0});
    auto two = select_net({{0.0, 0.0}, {0.5, 0.0}}, {0.1, 0.1});
    std::sort(two.begin(), two.end());
    EXPECT_EQ(two, (std::vector<std::size_t>{0, 1}));
    // 2t-disks touching at distance 4t: open disks, still disjoint
    EXPECT_EQ(select_net({{0.0, 0.0}, {0.4, 0.0}}, {0.1, 0.1}).size(), 2u);
    EXPECT_EQ(select_net({{0.0, 0.0}, {0.39, 0.0}}, {0.1, 0.1}).size(), 1u);
    EXPECT_THROW(select_net({{0.0, 0.0}}, {0.0}), DataError);
}

TEST(SelectNet, KochPackingAndCovering) {
    const auto g = make("koch", 8);
    const Ball B{{0.5, 0.1}, 0.5};
    const auto sp = wiggly_split(g.sample, B, 0.1 * std::log(2.0));
    std::vector<Point> pts;
    std::vector<double> t;
    for (std::size_t i = 0; i < sp.kb.size(); ++i)
        if (sp.t[i] > 0.0) {
            pts.push_back(g.sample.points[sp.kb[i]]);
            t.push_back(sp.t[i]);
        }
    ASSERT_FALSE(pts.empty());
    const auto net = select_net(pts, t);
    for (std::size_t a = 0; a < net.size(); ++a)
        for (std::size_t b = a + 1; b < net.size(); ++b)
            EXPECT_GE(dist(pts[net[a]], pts[net[b]]), 2.0 * (t[net[a]] + t[net[b]]));
    std::size_t uncovered = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool hit = false;
        for (auto j : net) hit = hit || dist(pts[i], pts[j]) <= 10.0 * t[j];
        uncovered += hit ? 0 : 1;
    }
    EXPECT_EQ(uncovered, 0u);
}

TEST(FilterNet, NoExceptionalSetKeepsEverything) {
    const auto g = make("koch", 6);
    const std::vector<Point> c{g.sample.points[10], g.sample.points[2000]};
    const auto f = filter_net(g.sample, c, {0.01, 0.02}, 0.01, 0.5);
    EXPECT_EQ(f.kept, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(f.e_total, 0.0);
    EXPECT_TRUE(f.e_total_pass);
    EXPECT_FALSE(f.pass);
}

TEST(FilterNet, DrownedCandidatesAreDropped) {
    const auto g = make("four_corners");
    std::vector<Point> c;
    std::vector<double> t;
    for (std::size_t i = 0; i < g.sample.size() && c.size() < 20; ++i)
        if (g.sample.tags[i] == Tag::E && g.sample.points[i][0] > 0.2 && g.sample.points[i][0] < 0.8) {
            c.push_back(g.sample.points[i]);
            t.push_back(0.05);
        }
    ASSERT_FALSE(c.empty());
    for (std::size_t i = 0; i < c.size(); ++i) ASSERT_GE(e_mass(g.sample, c[i], t[i]), 0.01 * t[i]);
    const auto f = filter_net(g.sample, c, t, 0.01, 1.0);
    EXPECT_TRUE(f.kept.empty());
    EXPECT_FALSE(f.pass);
    EXPECT_THROW(filter_net(g.sample, c, t, 0.5, 1.0), DataError);
}

TEST(LocalMeasure, Proportional) {
    EXPECT_EQ(local_measure({0.2}), std::vector<double>{1.0});
    const auto w = local_measure({1.0, 3.0});
    EXPECT_DOUBLE_EQ(w[0], 0.25);
    EXPECT_DOUBLE_EQ(w[1], 0.75);
    EXPECT_THROW(local_measure({}), InternalError);
}

TEST(Corona, SegmentUniversalIsGoodRoot) {
    const auto g = make("segment", 10);
    const auto mu = build_corona(g.sample, CoronaOptions{});
    ASSERT_EQ(mu.nodes.size(), 1u);
    EXPECT_EQ(mu.depth, 0);
    EXPECT_EQ(mu.nodes[0].kind, NodeKind::good);
    EXPECT_NEAR(mu.total_mass(), 1.0, 1e-12);
    EXPECT_NEAR(measure_query(mu, {0.25, 0.0}, 0.25), 0.5, 2.0 * g.sample.resolution);
    EXPECT_NEAR(measure_query(mu, {0.0, 0.0}, 0.5), 0.5, 2.0 * g.sample.resolution);
}

TEST(Corona, KochDeepTreeStructure) {
    const auto g = make("koch", 6);
    CoronaOptions o;
    o.M = 0.1;
    const auto mu = build_corona(g.sample, o);
    EXPECT_GE(mu.depth, 3);
    EXPECT_EQ(mu.nodes[0].kind, NodeKind::bad);
    const auto st = verify_structure(mu);
    EXPECT_LE(st.max_mass_error, 1e-12);
    EXPECT_EQ(st.overlap_same_level, 0u);
    EXPECT_EQ(st.overlap_parent_child, 0u);
    EXPECT_EQ(st.overlap_child_parent, 0u);
    EXPECT_EQ(st.not_contained_2x, 0u);
    for (double m : st.level_mass) EXPECT_NEAR(m, 1.0, 1e-12);
    EXPECT_NEAR(mu.total_mass(), 1.0, 1e-12);
    for (const auto& n : mu.nodes) {
        double child = 0.0;
        for (int c : n.children) {
            child += mu.nodes[static_cast<std::size_t>(c)].mass;
            EXPECT_EQ(mu.nodes[static_cast<std::size_t>(c)].level, n.level + 1);
        }
        if (!n.children.empty()) EXPECT_NEAR(child, n.mass, 1e-12);
    }
    for (const auto& a : mu.atoms) EXPECT_LE(dist(g.sample.points[a.point], mu.seed.center), mu.seed.radius * (1 + 1e-12));
}

TEST(Corona, AvoidingOnFlatSetSpreadsOverCore) {
    const auto g = make("segment", 10);
    CoronaOptions o;
    o.variant = Variant::avoiding;
    const auto mu = build_corona(g.sample, o);
    EXPECT_NEAR(mu.total_mass(), 1.0, 1e-12);
    EXPECT_EQ(mu.atom_e_weight(g.sample), 0.0);
}

TEST(Corona, AvoidingStuckOnFourCorners) {
    // every ball of the seed schedule carries E-mass above eps R
    const auto g = make("four_corners");
    CoronaOptions o;
    o.variant = Variant::avoiding;
    EXPECT_THROW(build_corona(g.sample, o), InternalError);
}

TEST(Corona, RejectsBadOptions) {
    const auto g = make("segment", 6);
    CoronaOptions o;
    o.M = -1.0;
    EXPECT_THROW(build_corona(g.sample, o), DataError);
    o = CoronaOptions{};
    o.variant = Variant::avoiding;
    o.eps = 0.5;
    EXPECT_THROW(build_corona(g.sample, o), DataError);
}

TEST(MeasureQuery, LimitCases) {
    const auto g = make("koch", 6);
    const auto mu = build_corona(g.sample, CoronaOptions{});
    EXPECT_NEAR(measure_query(mu, mu.seed.center, 2.0 * g.sample.diameter), 1.0, 1e-12);
    EXPECT_EQ(measure_query(mu, {0.5, -0.5}, 0.1), 0.0);
    // the Koch curve is symmetric about x = 1/2; a huge ball approximates the half-plane
    const double left = measure_query(mu, {-999.5, 0.0}, 1000.0 - 1e-9);
    EXPECT_NEAR(left, 0.5, 0.02);
}

TEST(ScalingAudit, SegmentLengthMeasure) {
    const auto g = make("segment", 10);
    const auto mu = build_corona(g.sample, CoronaOptions{});
    const auto a = scaling_audit(mu, g.sample, 300);
    EXPECT_GE(a.C, 0.25);
    EXPECT_LE(a.C, 4.0);
    EXPECT_TRUE(a.integral_constant);
    EXPECT_EQ(a.violations_linear, 0u);
    for (const auto& p : a.probes)
        if (p.r >= a.R * (1 - 1e-12)) EXPECT_LE(p.mu, a.C + 1e-12);
}

TEST(ScalingAudit, KochDecayConstantPositive) {
    const auto g = make("koch", 6);
    const auto mu = build_corona(g.sample, CoronaOptions{});
    const auto a = scaling_audit(mu, g.sample, 300);
    EXPECT_GT(a.C_prime, 0.0);
    EXPECT_FALSE(a.integral_constant);
    EXPECT_EQ(a.violations_linear, 0u);
    EXPECT_EQ(a.violations_envelope, 0u);
    const auto b = scaling_audit(mu, g.sample, 300);
    EXPECT_EQ(a.C, b.C);
    EXPECT_EQ(a.C_prime, b.C_prime);
}
