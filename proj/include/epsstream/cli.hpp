#pragma once

// Command implementations behind the epsstream executable. Argument parsing
// lives in tools/; everything here works on streams so it can be tested.

#include "epsstream/exact_oracles.hpp"
#include "epsstream/range_queries.hpp"
#include "epsstream/robust_stats.hpp"
#include "epsstream/stream_engine.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace epsstream::cli {

enum ExitCode : int { kOk = 0, kParse = 2, kConfig = 3, kCertification = 4 };

/// Maps an exception to the documented exit code.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return kParse;
    if (dynamic_cast<const CertificationError*>(&e)) return kCertification;
    return kConfig;
}

inline std::vector<Point2> read_points(std::istream& in, const CoordinateScale& scale) {
    std::vector<Point2> out;
    std::string line;
    for (std::size_t number = 1; std::getline(in, line); ++number) {
        const std::string_view t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        try {
            out.push_back(scale.parse_point(t));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(number) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<Point2> read_points_file(const std::string& path, const CoordinateScale& scale) {
    if (path.empty() || path == "-") return read_points(std::cin, scale);
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    return read_points(in, scale);
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// Write to a sibling temporary, then rename, so readers never see a
/// partial file.
inline void write_file(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::invalid_argument("cannot write " + path);
        out << text;
        if (!out) throw std::invalid_argument("cannot write " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::invalid_argument("cannot replace " + path);
}

inline nlohmann::json user_point(const RationalPoint& p, const CoordinateScale& scale) {
    const RationalPoint u = scale.to_user(p);
    return nlohmann::json::array({to_string(u.x), to_string(u.y)});
}

inline nlohmann::json user_line(const FitLine& l, const CoordinateScale& scale) {
    return {{"slope", to_string(l.slope)}, {"intercept", to_string(scale.to_user(l.intercept))}};
}

/// "a,b" in user units: slope a, intercept b.
inline FitLine parse_line(std::string_view text, const CoordinateScale& scale) {
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) throw ParseError("line must be 'slope,intercept'");
    return {parse_rational(text.substr(0, comma)), scale.scale_exact(parse_rational(text.substr(comma + 1)))};
}

// ------------------------------------------------------------------ build

struct BuildResult {
    StreamEngine engine;
    Snapshot snapshot;
};

inline BuildResult run_build(const std::vector<Point2>& points, StreamEngine engine) {
    for (const Point2& p : points) engine.insert(p);
    if (engine.size() == 0) throw ParseError("empty stream");
    Snapshot snap = engine.snapshot();
    return {std::move(engine), std::move(snap)};
}

inline nlohmann::json build_summary(const BuildResult& r) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& [level, s] : r.engine.slots()) levels.push_back(level);
    const MemoryFootprint f = r.engine.memory_footprint();
    return {{"n", r.engine.size()},
            {"slots", levels},
            {"points_stored", f.points_stored},
            {"unreduced_levels", f.unreduced_levels},
            {"snapshot_size", r.snapshot.sample.size()},
            {"certified_error", to_string(r.snapshot.certified_error)}};
}

// ------------------------------------------------------------------ query

inline nlohmann::json net_json(const Snapshot& snap) {
    nlohmann::json pts = nlohmann::json::array();
    for (const Point2& p : eps_net(snap)) pts.push_back(user_point(RationalPoint(p), snap.config.scale));
    return {{"points", pts}};
}

inline nlohmann::json answer_query(const Snapshot& snap, std::string_view line) {
    line = detail::trim(line);
    const auto space = line.find(' ');
    const std::string_view verb = line.substr(0, space);
    const std::string_view rest = space == std::string_view::npos ? std::string_view{} : detail::trim(line.substr(space + 1));
    const CoordinateScale& scale = snap.config.scale;
    if (verb == "count") {
        const CountEstimate c = approx_count(snap, parse_descriptor(rest, scale));
        return {{"estimate", to_string(c.estimate)}, {"bound", to_string(c.additive_bound)}};
    }
    if (verb == "iceberg") {
        const auto sp = rest.find(' ');
        if (sp == std::string_view::npos) throw ParseError("iceberg needs 'theta descriptor'");
        const Rational theta = parse_rational(rest.substr(0, sp));
        return {{"verdict", std::string(verdict_name(iceberg_query(snap, parse_descriptor(rest.substr(sp + 1), scale), theta)))}};
    }
    if (verb == "net") return net_json(snap);
    throw ParseError("unknown query verb '" + std::string(verb) + "'");
}

/// One JSON line per non-blank query line, in order. Failing lines answer
/// with an error record; the worst exit code is returned.
inline int run_query(const Snapshot& snap, std::istream& queries, std::ostream& out) {
    int code = kOk;
    std::string line;
    for (std::size_t number = 1; std::getline(queries, line); ++number) {
        if (detail::trim(line).empty()) continue;
        try {
            out << answer_query(snap, line).dump() << '\n';
        } catch (const std::exception& e) {
            out << nlohmann::json{{"line", number}, {"error", e.what()}}.dump() << '\n';
            code = std::max(code, exit_code_for(e));
        }
    }
    return code;
}

// ------------------------------------------------------------------ stats

struct StatRequest {
    std::string name;
    std::optional<std::string> point, line, slope, delta, fraction, range;
};

inline const std::string& need(const std::optional<std::string>& v, const char* flag) {
    if (!v) throw std::invalid_argument(std::string("missing ") + flag);
    return *v;
}

inline nlohmann::json depth_json(const DepthValue& d) {
    return {{"value", to_string(d.value)}, {"additive_bound", to_string(d.additive_bound)}};
}

inline nlohmann::json run_stat(const Snapshot& snap, const StatRequest& req) {
    const CoordinateScale& scale = snap.config.scale;
    nlohmann::json out;
    const std::string& n = req.name;
    if (n == "tukey-depth") {
        out = depth_json(tukey_depth(snap, scale.parse_point(need(req.point, "--point"))));
    } else if (n == "tukey-median") {
        const TukeyMedian m = tukey_median(snap);
        out = depth_json(m.depth);
        out["point"] = user_point(m.point, scale);
    } else if (n == "simplicial") {
        std::optional<Rational> delta;
        if (req.delta) delta = parse_rational(*req.delta);
        out = depth_json(simplicial_depth_estimate(snap, scale.parse_point(need(req.point, "--point")), delta));
    } else if (n == "regdepth") {
        out = depth_json(regression_depth(snap, parse_line(need(req.line, "--line"), scale)));
    } else if (n == "regfit") {
        const RegressionFit f = max_regression_depth_fit(snap);
        out = depth_json(f.depth);
        out["line"] = user_line(f.line, scale);
    } else if (n == "slope-rank") {
        out = depth_json(slope_rank_estimate(snap, parse_rational(need(req.slope, "--slope"))));
    } else if (n == "theil-sen") {
        const FitLine l = theil_sen_fit(snap);
        out = {{"line", user_line(l, scale)}, {"additive_bound", to_string(snap.sample.eps_bound)}};
    } else if (n == "lms-loc") {
        const LmsLocation l = lms_location(snap);
        out = {{"center", user_point(l.center, scale)},
               {"radius2", to_string(l.radius2 / (Rational(scale.factor()) * scale.factor()))},
               {"mass", to_string(l.mass)},
               {"additive_bound", to_string(snap.sample.eps_bound)}};
    } else if (n == "lms-reg") {
        const LmsRegression l = lms_regression(snap);
        out = {{"line", user_line(l.line, scale)},
               {"width", to_string(scale.to_user(l.width))},
               {"mass", to_string(l.mass)},
               {"additive_bound", to_string(snap.sample.eps_bound)}};
    } else {
        throw std::invalid_argument("unknown statistic '" + n + "'");
    }
    out["stat"] = n;
    return out;
}

/// Exact reference values on the raw points.
inline nlohmann::json run_oracle(const std::vector<Point2>& pts, const CoordinateScale& scale, const StatRequest& req) {
    nlohmann::json out;
    const std::string& n = req.name;
    auto fraction = [&] { return req.fraction ? parse_rational(*req.fraction) : make_rational(1, 2); };
    if (n == "count") {
        out = {{"value", exact::exact_count(pts, parse_descriptor(need(req.range, "--range"), scale))}};
    } else if (n == "tukey-depth") {
        out = {{"value", to_string(exact::exact_tukey_depth(pts, RationalPoint(scale.parse_point(need(req.point, "--point")))))}};
    } else if (n == "tukey-median") {
        const exact::DeepestPoint d = exact::exact_max_tukey_depth(pts);
        out = {{"value", to_string(d.depth)}, {"point", user_point(d.point, scale)}};
    } else if (n == "simplicial") {
        out = {{"value", to_string(exact::exact_simplicial_depth(pts, scale.parse_point(need(req.point, "--point"))))}};
    } else if (n == "regdepth") {
        const FitLine l = parse_line(need(req.line, "--line"), scale);
        out = {{"value", to_string(exact::exact_regression_depth(pts, l.slope, l.intercept))}};
    } else if (n == "slope-rank") {
        out = {{"value", to_string(exact::exact_slope_rank(pts, parse_rational(need(req.slope, "--slope"))))}};
    } else if (n == "lms-loc") {
        const exact::LmsDisk d = exact::exact_lms_disk(pts, fraction());
        out = {{"center", user_point(d.center, scale)},
               {"radius2", to_string(d.r2 / (Rational(scale.factor()) * scale.factor()))},
               {"count", d.count}};
    } else if (n == "lms-reg") {
        const exact::LmsSlab s = exact::exact_lms_slab(pts, fraction());
        out = {{"line", user_line({s.slope, s.intercept}, scale)}, {"width", to_string(scale.to_user(s.width))}, {"count", s.count}};
    } else {
        throw std::invalid_argument("unknown oracle '" + n + "'");
    }
    out["oracle"] = n;
    return out;
}

// ------------------------------------------------------------------ bench

/// Deterministic stand-in stream when no input is given: a Halton sequence
/// in [0, 1)^2 on the lattice.
inline std::vector<Point2> halton_points(std::size_t n, const CoordinateScale& scale) {
    auto radical = [](std::uint64_t i, std::uint64_t base) {
        Rational f = 1, r = 0;
        while (i > 0) {
            f /= base;
            r += f * (i % base);
            i /= base;
        }
        return r;
    };
    std::vector<Point2> out;
    for (std::size_t i = 1; i <= n; ++i) out.push_back({scale.scale_value(radical(i, 2)), scale.scale_value(radical(i, 3))});
    return out;
}

/// CSV rows n, points_stored, levels, max_error, runtime_ms. max_error is the
/// exact worst range-count error, left empty above the oracle cap.
inline void run_bench(const EngineConfig& cfg, const std::vector<std::size_t>& sizes, const std::vector<Point2>& stream,
                      std::ostream& out, bool timing = true) {
    out << "n,points_stored,levels,max_error,runtime_ms\n";
    for (std::size_t n : sizes) {
        if (n == 0 || n > stream.size()) throw std::invalid_argument("bench size " + std::to_string(n) + " exceeds the stream");
        const auto start = std::chrono::steady_clock::now();
        StreamEngine e(cfg);
        for (std::size_t i = 0; i < n; ++i) e.insert(stream[i]);
        const Snapshot snap = e.snapshot();
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        std::string err;
        try {
            const Rational d = exact::exact_discrepancy(std::span(stream).first(n), snap.sample, cfg.family);
            err = to_string(d * Rational(n));
        } catch (const CapExceeded&) {
        }
        const MemoryFootprint f = e.memory_footprint();
        out << n << ',' << f.points_stored << ',' << f.levels_occupied << ',' << err << ',';
        if (timing) out << static_cast<long long>(ms + 0.5);
        out << '\n';
    }
}

}  // namespace epsstream::cli
