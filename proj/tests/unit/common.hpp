#pragma once

#include <string>
#include <vector>

#include "wiggly/wiggly.hpp"

namespace testing_util {

inline wiggly::Generated make(const std::string& family, int level = -1, double resolution = 0.0) {
    wiggly::GeneratorSpec s;
    s.family = family;
    s.level = level;
    s.resolution = resolution;
    return wiggly::generate(s);
}

// Equispaced points on the segment a-b with pitch at most h.
inline std::vector<wiggly::Point> line_points(wiggly::Point a, wiggly::Point b, double h) {
    const int n = static_cast<int>(std::ceil(wiggly::dist(a, b) / h));
    std::vector<wiggly::Point> out;
    for (int i = 0; i <= n; ++i) out.push_back(a + (static_cast<double>(i) / n) * (b - a));
    return out;
}

}  // namespace testing_util
