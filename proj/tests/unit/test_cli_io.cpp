#include <gtest/gtest.h>

#include <sstream>

#include "common.hpp"

using namespace wiggly;
using testing_util::make;

namespace {

std::string serialize(const Dataset& d) {
    std::ostringstream os;
    write_dataset(os, d);
    return os.str();
}

Dataset parse(const std::string& text) {
    std::istringstream is(text);
    return read_dataset(is);
}

const json& koch_report() {
    static const json r = [] {
        AnalyzeOptions o;
        o.all();
        o.points = 8;
        o.probes = 100;
        return analyze(dataset_from(make("koch", 6)), o);
    }();
    return r;
}

}  // namespace

TEST(Dataset, RoundTripIsBitExact) {
    for (const char* f : {"circle", "four_corners", "julia"}) {
        const auto d = dataset_from(make(f));
        const auto back = parse(serialize(d));
        ASSERT_EQ(back.sample.size(), d.sample.size());
        EXPECT_EQ(back.sample.points, d.sample.points) << f;
        EXPECT_EQ(back.sample.tags, d.sample.tags);
        EXPECT_EQ(back.sample.e_weight, d.sample.e_weight);
        EXPECT_EQ(back.sample.resolution, d.sample.resolution);
        EXPECT_EQ(back.family, f);
        EXPECT_EQ(serialize(back), serialize(d));
    }
}

TEST(Dataset, HeaderCarriesGroundTruth) {
    const auto text = serialize(dataset_from(make("koch", 3)));
    const auto h = json::parse(text.substr(0, text.find('\n')));
    EXPECT_EQ(h["count"], 65);
    EXPECT_EQ(h["family"], "koch");
    EXPECT_NEAR(h["ground_truth"]["known_dim"].get<double>(), std::log(4.0) / std::log(3.0), 1e-15);
    EXPECT_EQ(h["params"]["level"], 3);
}

TEST(Dataset, CountMismatchRejected) {
    auto text = serialize(dataset_from(make("segment", 3)));
    text.erase(text.rfind('[', text.size() - 2));
    EXPECT_THROW(parse(text), DataError);
}

TEST(Dataset, MalformedRecordsRejected) {
    const std::string head =
        R"({"format":"wiggly-dataset","version":1,"family":"","resolution":0.5,"ambient_dim":2,"count":2})"
        "\n";
    EXPECT_NO_THROW(parse(head + "[0,0,\"W\",0]\n[1,0,\"W\",0]\n"));
    EXPECT_THROW(parse(head + "[0,0,\"X\",0]\n[1,0,\"W\",0]\n"), DataError);
    EXPECT_THROW(parse(head + "[0,0,\"W\"]\n[1,0,\"W\",0]\n"), DataError);
    EXPECT_THROW(parse(head + "[0,0,\"W\",0]\n[1,0,\"W\",0.5]\n"), DataError);
    EXPECT_THROW(parse(head + "not json\n[1,0,\"W\",0]\n"), DataError);
    EXPECT_THROW(parse("[0,0,\"W\",0]\n"), DataError);
    EXPECT_THROW(parse(""), DataError);
}

TEST(Dataset, CsvMirror) {
    const auto g = make("segment", 2);
    std::ostringstream os;
    write_dataset_csv(os, g.sample);
    EXPECT_EQ(os.str(), "x,y,tag,e_weight\n0,0,W,0\n0.25,0,W,0\n0.5,0,W,0\n0.75,0,W,0\n1,0,W,0\n");
}

TEST(Report, ValidatesAgainstSchema) {
    const auto& r = koch_report();
    EXPECT_TRUE(validate_report(r).empty());
    for (const char* s : {"betas", "densities", "porosity", "convex", "corona", "dimension"}) EXPECT_TRUE(r.contains(s)) << s;
    EXPECT_NEAR(r["dimension"]["box"]["dim"].get<double>(), std::log(4.0) / std::log(3.0), 0.1);
}

TEST(Report, SectionsCarryWindowAndTolerance) {
    const auto& r = koch_report();
    for (const char* s : {"betas", "densities", "porosity", "convex"}) {
        EXPECT_TRUE(r[s].contains("window")) << s;
        EXPECT_TRUE(r[s].contains("tolerance")) << s;
    }
}

TEST(Report, UnknownFieldsRejected) {
    auto r = koch_report();
    r["extra"] = 1;
    EXPECT_FALSE(validate_report(r).empty());
    r = koch_report();
    r["dimension"]["box"]["bogus"] = true;
    EXPECT_FALSE(validate_report(r).empty());
    r = koch_report();
    r["dimension"]["box"]["dim"] = "high";
    EXPECT_FALSE(validate_report(r).empty());
}

TEST(Report, PartialAnalysis) {
    AnalyzeOptions o;
    o.beta = true;
    o.points = 4;
    const auto r = analyze(dataset_from(make("segment", 8)), o);
    EXPECT_TRUE(validate_report(r).empty());
    EXPECT_TRUE(r.contains("betas"));
    EXPECT_FALSE(r.contains("corona"));
    EXPECT_THROW(svg::tree(r), DataError);
    EXPECT_THROW(svg::loglog(r), DataError);
}

TEST(Svg, AllKinds) {
    const auto& r = koch_report();
    const auto ll = svg::loglog(r);
    EXPECT_EQ(ll.rfind("<?xml", 0), 0u);
    EXPECT_NE(ll.find("slope"), std::string::npos);
    EXPECT_NE(svg::profile(r, 0).find("<polyline"), std::string::npos);
    EXPECT_THROW(svg::profile(r, 1000), DataError);
    EXPECT_NE(svg::tree(r, 3).find("<circle"), std::string::npos);
    for (const auto& s : {ll, svg::tree(r)}) EXPECT_NE(s.find("</svg>"), std::string::npos);
}
