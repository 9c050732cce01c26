#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "error.hpp"
#include "generators.hpp"
#include "sample.hpp"

namespace wiggly {

// JSON-friendly %.17g; enough digits to round-trip any double exactly.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline nlohmann::json spec_to_json(const GeneratorSpec& s) {
    nlohmann::json p;
    p["level"] = s.level;
    p["resolution_target"] = s.resolution;
    p["alpha"] = s.alpha;
    p["copies"] = s.copies;
    p["slices"] = s.slices;
    p["base"] = s.base;
    p["c"] = {s.c.real(), s.c.imag()};
    p["depth"] = s.depth;
    p["seed_count"] = s.seed_count;
    return p;
}

inline nlohmann::json truth_to_json(const GroundTruth& t) {
    nlohmann::json j;
    j["known_dim"] = t.known_dim ? nlohmann::json(*t.known_dim) : nlohmann::json(nullptr);
    j["total_E_length"] = t.total_E_length ? nlohmann::json(*t.total_E_length) : nlohmann::json(nullptr);
    j["uniformly_wiggly"] = t.uniformly_wiggly ? nlohmann::json(*t.uniformly_wiggly) : nlohmann::json(nullptr);
    j["notes"] = t.notes;
    return j;
}

struct Dataset {
    std::string family;  // empty for imported point clouds
    nlohmann::json params = nlohmann::json::object();
    nlohmann::json truth = nlohmann::json::object();
    TaggedSample sample;
};

inline Dataset dataset_from(const Generated& g) {
    Dataset d;
    d.family = g.spec.family;
    d.params = spec_to_json(g.spec);
    d.truth = truth_to_json(g.truth);
    d.sample = g.sample;
    return d;
}

// Header line, then one record per point: [x, y(, z), "W"|"E", e_weight].
inline void write_dataset(std::ostream& os, const Dataset& d) {
    const auto& s = d.sample;
    nlohmann::json h;
    h["format"] = "wiggly-dataset";
    h["version"] = 1;
    h["family"] = d.family;
    h["params"] = d.params;
    h["resolution"] = s.resolution;
    h["ambient_dim"] = s.ambient_dim;
    h["ground_truth"] = d.truth;
    h["count"] = s.size();
    os << h.dump() << '\n';
    for (std::size_t i = 0; i < s.size(); ++i) {
        os << '[';
        for (int a = 0; a < s.ambient_dim; ++a) os << fmt17(s.points[i][static_cast<std::size_t>(a)]) << ',';
        os << '"' << tag_name(s.tags[i]) << "\"," << fmt17(s.e_weight[i]) << "]\n";
    }
}

inline void write_dataset_file(const std::string& path, const Dataset& d) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open for writing: " + path);
    write_dataset(f, d);
    if (!f) throw DataError("write failed: " + path);
}

inline Dataset read_dataset(std::istream& is) {
    Dataset d;
    std::string line;
    if (!std::getline(is, line)) throw DataError("dataset is empty");
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("dataset header is not JSON: ") + e.what());
    }
    if (!h.is_object() || h.value("format", "") != "wiggly-dataset") throw DataError("missing dataset header");
    for (const char* key : {"resolution", "ambient_dim", "count"})
        if (!h.contains(key) || !h[key].is_number()) throw DataError(std::string("dataset header lacks ") + key);
    d.family = h.value("family", "");
    if (h.contains("params")) d.params = h["params"];
    if (h.contains("ground_truth")) d.truth = h["ground_truth"];
    auto& s = d.sample;
    s.resolution = h["resolution"].get<double>();
    s.ambient_dim = h["ambient_dim"].get<int>();
    if (s.ambient_dim < 2 || s.ambient_dim > kMaxDim) throw DataError("ambient_dim must be 2 or 3");
    const auto count = h["count"].get<long long>();
    if (count < 0) throw DataError("negative record count");
    const std::size_t dim = static_cast<std::size_t>(s.ambient_dim);
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json r;
        try {
            r = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            throw DataError("malformed record on line " + std::to_string(lineno));
        }
        if (!r.is_array() || r.size() != dim + 2) throw DataError("record on line " + std::to_string(lineno) + " has wrong arity");
        Point p;
        for (std::size_t a = 0; a < dim; ++a) {
            if (!r[a].is_number()) throw DataError("non-numeric coordinate on line " + std::to_string(lineno));
            p[a] = r[a].get<double>();
        }
        if (!r[dim].is_string() || !r[dim + 1].is_number()) throw DataError("bad tag or weight on line " + std::to_string(lineno));
        const auto tag = r[dim].get<std::string>();
        if (tag != "W" && tag != "E") throw DataError("unknown tag '" + tag + "' on line " + std::to_string(lineno));
        s.points.push_back(p);
        s.tags.push_back(tag == "W" ? Tag::W : Tag::E);
        s.e_weight.push_back(r[dim + 1].get<double>());
    }
    if (static_cast<long long>(s.points.size()) != count)
        throw DataError("record count " + std::to_string(s.points.size()) + " does not match header count " +
                        std::to_string(count));
    s.finalize();
    return d;
}

inline Dataset read_dataset_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open dataset: " + path);
    return read_dataset(f);
}

inline void write_dataset_csv(std::ostream& os, const TaggedSample& s) {
    os << (s.ambient_dim == 3 ? "x,y,z,tag,e_weight\n" : "x,y,tag,e_weight\n");
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (int a = 0; a < s.ambient_dim; ++a) os << fmt17(s.points[i][static_cast<std::size_t>(a)]) << ',';
        os << tag_name(s.tags[i]) << ',' << fmt17(s.e_weight[i]) << '\n';
    }
}

}  // namespace wiggly
