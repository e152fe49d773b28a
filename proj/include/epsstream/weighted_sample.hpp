#pragma once

#include "epsstream/geometry.hpp"
#include "epsstream/numeric.hpp"
#include "epsstream/range_families.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace epsstream {

inline constexpr int kSampleFormatVersion = 1;

/// Points with positive rational weights. total_weight is the represented
/// population mass and eps_bound the certified approximation error.
struct WeightedSample {
    std::vector<Point2> points;
    std::vector<Rational> weights;
    Rational total_weight = 0;
    Rational eps_bound = 0;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    /// Unit weights, eps_bound 0. Duplicates are merged.
    static WeightedSample from_points(std::span<const Point2> pts) {
        WeightedSample s;
        s.points.assign(pts.begin(), pts.end());
        s.weights.assign(pts.size(), Rational(1));
        s.total_weight = Rational(static_cast<long long>(pts.size()));
        s.canonicalize();
        return s;
    }

    /// Sorts by (x, y) and merges duplicate locations by summing weights.
    /// Exact for every range family since a range cannot separate them.
    void canonicalize() {
        std::vector<std::size_t> order(points.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
        std::vector<Point2> p;
        std::vector<Rational> w;
        for (std::size_t i : order) {
            if (!p.empty() && p.back() == points[i])
                w.back() += weights[i];
            else {
                p.push_back(points[i]);
                w.push_back(weights[i]);
            }
        }
        points = std::move(p);
        weights = std::move(w);
    }

    bool is_canonical() const {
        for (std::size_t i = 1; i < points.size(); ++i)
            if (!(points[i - 1] < points[i])) return false;
        return true;
    }

    Rational weight_sum() const {
        Rational s = 0;
        for (const Rational& w : weights) s += w;
        return s;
    }

    Rational max_weight() const {
        Rational m = 0;
        for (const Rational& w : weights) m = std::max(m, w);
        return m;
    }

    /// Throws std::logic_error if an invariant is broken.
    void check_invariants() const {
        if (points.size() != weights.size()) throw std::logic_error("sample: points/weights length mismatch");
        for (const Rational& w : weights)
            if (w <= 0) throw std::logic_error("sample: nonpositive weight");
        if (weight_sum() != total_weight) throw std::logic_error("sample: weights do not sum to total_weight");
        if (eps_bound < 0) throw std::logic_error("sample: negative eps_bound");
    }

    friend bool operator==(const WeightedSample&, const WeightedSample&) = default;
};

/// Sum of weights of sample points inside r.
inline Rational weighted_count(const WeightedSample& s, const RangeDescriptor& r) {
    Rational c = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (contains(r, s.points[i])) c += s.weights[i];
    return c;
}

// ---------------------------------------------------------------------------
// JSON

inline Rational rational_from_json(const nlohmann::json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    throw ParseError("expected an exact rational string");
}

inline nlohmann::json sample_to_json(const WeightedSample& s, const RangeFamily& family, const CoordinateScale& scale) {
    nlohmann::json pts = nlohmann::json::array();
    for (std::size_t i = 0; i < s.size(); ++i) pts.push_back({s.points[i].x, s.points[i].y, to_string(s.weights[i])});
    return {{"version", kSampleFormatVersion},
            {"family", std::string(family.name())},
            {"scale", scale.factor()},
            {"eps_bound", to_string(s.eps_bound)},
            {"total_weight", to_string(s.total_weight)},
            {"points", std::move(pts)}};
}

struct ParsedSample {
    WeightedSample sample;
    RangeFamily family;
    CoordinateScale scale;
};

inline ParsedSample sample_from_json(const nlohmann::json& j) {
    try {
        if (j.at("version").get<int>() != kSampleFormatVersion) throw ParseError("unsupported sample version");
        ParsedSample out{WeightedSample{}, RangeFamily(parse_family(j.at("family").get<std::string>())),
                         CoordinateScale(j.value("scale", CoordinateScale::kDefaultFactor))};
        out.sample.eps_bound = rational_from_json(j.at("eps_bound"));
        out.sample.total_weight = rational_from_json(j.at("total_weight"));
        for (const auto& p : j.at("points")) {
            if (!p.is_array() || p.size() != 3) throw ParseError("sample point must be [x, y, weight]");
            out.sample.points.push_back({p[0].get<std::int64_t>(), p[1].get<std::int64_t>()});
            out.sample.weights.push_back(rational_from_json(p[2]));
        }
        out.sample.check_invariants();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed sample json: ") + e.what());
    } catch (const std::logic_error& e) {
        throw ParseError(std::string("invalid sample: ") + e.what());
    }
}

}  // namespace epsstream
