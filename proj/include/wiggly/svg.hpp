#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dimension.hpp"
#include "error.hpp"

namespace wiggly::svg {

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

// Plot frame mapping data coordinates into a fixed 640x480 canvas.
struct Frame {
    double x0, x1, y0, y1;
    double left = 70, right = 620, top = 30, bottom = 420;

    double px(double x) const { return left + (x - x0) / (x1 - x0) * (right - left); }
    double py(double y) const { return bottom - (y - y0) / (y1 - y0) * (bottom - top); }
};

inline Frame frame_for(std::vector<double> xs, std::vector<double> ys) {
    auto [xa, xb] = std::minmax_element(xs.begin(), xs.end());
    auto [ya, yb] = std::minmax_element(ys.begin(), ys.end());
    Frame f{*xa, *xb, *ya, *yb};
    if (f.x1 - f.x0 < 1e-12) f.x1 = f.x0 + 1.0;
    if (f.y1 - f.y0 < 1e-12) f.y1 = f.y0 + 1.0;
    const double mx = 0.05 * (f.x1 - f.x0), my = 0.05 * (f.y1 - f.y0);
    f.x0 -= mx;
    f.x1 += mx;
    f.y0 -= my;
    f.y1 += my;
    return f;
}

inline void open(std::ostringstream& os, const std::string& title) {
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n"
       << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n"
       << "<text x=\"320\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << escape(title)
       << "</text>\n";
}

inline void axes(std::ostringstream& os, const Frame& f, const std::string& xl, const std::string& yl) {
    os << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << num(f.left) << "\" y=\"" << num(f.top) << "\" width=\""
       << num(f.right - f.left) << "\" height=\"" << num(f.bottom - f.top) << "\"/></g>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double x = f.x0 + (f.x1 - f.x0) * i / 4.0, y = f.y0 + (f.y1 - f.y0) * i / 4.0;
        os << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(f.bottom + 15) << "\" text-anchor=\"middle\">" << num(x)
           << "</text>\n";
        os << "<text x=\"" << num(f.left - 5) << "\" y=\"" << num(f.py(y) + 4) << "\" text-anchor=\"end\">" << num(y)
           << "</text>\n";
    }
    os << "<text x=\"" << num((f.left + f.right) / 2) << "\" y=\"455\" text-anchor=\"middle\">" << escape(xl) << "</text>\n";
    os << "<text x=\"15\" y=\"" << num((f.top + f.bottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
       << num((f.top + f.bottom) / 2) << ")\">" << escape(yl) << "</text>\n</g>\n";
}

}  // namespace detail

// log N against log(1/side) with the fitted line and its slope.
inline std::string loglog(const nlohmann::json& report) {
    if (!report.contains("dimension")) throw DataError("report has no dimension section");
    const auto& box = report["dimension"]["box"];
    std::vector<double> xs, ys;
    for (const auto& c : box["counts"]) {
        xs.push_back(-std::log(c["side"].get<double>()));
        ys.push_back(std::log(c["count"].get<double>()));
    }
    if (xs.size() < 2) throw DataError("report has too few box counts to plot");
    const auto fit = least_squares(xs, ys);
    const auto f = detail::frame_for(xs, ys);
    std::ostringstream os;
    detail::open(os, "box counts");
    detail::axes(os, f, "log(1/side)", "log N");
    os << "<line stroke=\"#c33\" stroke-width=\"1.5\" x1=\"" << detail::num(f.px(xs.front())) << "\" y1=\""
       << detail::num(f.py(fit.intercept + fit.slope * xs.front())) << "\" x2=\"" << detail::num(f.px(xs.back()))
       << "\" y2=\"" << detail::num(f.py(fit.intercept + fit.slope * xs.back())) << "\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        os << "<circle r=\"3.5\" fill=\"#236\" cx=\"" << detail::num(f.px(xs[i])) << "\" cy=\"" << detail::num(f.py(ys[i]))
           << "\"/>\n";
    os << "<text x=\"90\" y=\"55\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#c33\">slope " << detail::num(fit.slope)
       << " +/- " << detail::num(fit.stderr_slope) << "</text>\n</svg>\n";
    return os.str();
}

// beta against scale exponent k for one base point of the report.
inline std::string profile(const nlohmann::json& report, std::size_t index) {
    if (!report.contains("betas")) throw DataError("report has no betas section");
    const auto& list = report["betas"]["points"];
    if (index >= list.size()) throw DataError("profile index out of range");
    const auto& p = list[index];
    const auto beta = p["beta"].get<std::vector<double>>();
    if (beta.empty()) throw DataError("profile is empty");
    const double lambda = report["betas"]["window"]["lambda"].get<double>();
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        xs.push_back(std::log(1.0 / lambda) * static_cast<double>(p["k_min"].get<int>() + static_cast<int>(i)));
        ys.push_back(beta[i]);
    }
    ys.push_back(0.0);
    auto f = detail::frame_for(xs, ys);
    ys.pop_back();
    std::ostringstream os;
    detail::open(os, "beta profile at (" + detail::num(p["x"][0].get<double>()) + ", " + detail::num(p["x"][1].get<double>()) + ")");
    detail::axes(os, f, "log(1/r)", "beta");
    os << "<polyline fill=\"none\" stroke=\"#236\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? " " : "") << detail::num(f.px(xs[i])) << ',' << detail::num(f.py(ys[i]));
    os << "\"/>\n</svg>\n";
    return os.str();
}

// Corona balls of level <= max_level as nested circles.
inline std::string tree(const nlohmann::json& report, int max_level = 3) {
    if (!report.contains("corona")) throw DataError("report has no corona section");
    const auto& c = report["corona"];
    const auto& seed = c["seed"];
    const double cx = seed["center"][0].get<double>(), cy = seed["center"][1].get<double>();
    const double R = seed["radius"].get<double>();
    detail::Frame f{cx - 1.05 * R, cx + 1.05 * R, cy - 1.05 * R, cy + 1.05 * R};
    f.left = 120;
    f.right = 520;
    f.top = 40;
    f.bottom = 440;
    static const char* colours[] = {"#236", "#c33", "#383", "#a60"};
    std::ostringstream os;
    detail::open(os, std::string("corona tree (") + c["variant"].get<std::string>() + ")");
    const double scale = (f.right - f.left) / (f.x1 - f.x0);
    for (const auto& n : c["nodes"]) {
        const int level = n["level"].get<int>();
        if (level > max_level) continue;
        const double r = std::max(0.5, n["radius"].get<double>() * scale);
        os << "<circle fill=\"none\" stroke-width=\"1\" stroke=\"" << colours[level % 4] << "\" cx=\""
           << detail::num(f.px(n["center"][0].get<double>())) << "\" cy=\"" << detail::num(f.py(n["center"][1].get<double>()))
           << "\" r=\"" << detail::num(r) << "\"><title>level " << level << ", " << n["kind"].get<std::string>() << ", mass "
           << detail::num(n["mass"].get<double>()) << "</title></circle>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace wiggly::svg
