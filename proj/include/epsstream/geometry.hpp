#pragma once

#include "epsstream/numeric.hpp"

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>

namespace epsstream {

/// Largest admissible |coordinate| after scaling. Keeps orientation and
/// dot products of coordinate differences inside 128-bit arithmetic.
inline constexpr std::int64_t kMaxCoordinate = std::int64_t{1} << 40;

/// Planar point on the integer lattice of scaled coordinates.
struct Point2 {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend constexpr auto operator<=>(const Point2&, const Point2&) = default;
};

enum class Orientation { CW = -1, Collinear = 0, CCW = 1 };

inline Int128 cross(const Point2& o, const Point2& a, const Point2& b) {
    return Int128(a.x - o.x) * Int128(b.y - o.y) - Int128(a.y - o.y) * Int128(b.x - o.x);
}

inline Int128 dot(const Point2& o, const Point2& a, const Point2& b) {
    return Int128(a.x - o.x) * Int128(b.x - o.x) + Int128(a.y - o.y) * Int128(b.y - o.y);
}

inline Orientation orient(const Point2& p, const Point2& q, const Point2& r) {
    return static_cast<Orientation>(sign_of(cross(p, q, r)));
}

/// Sign of the in-circle determinant: +1 when d lies strictly inside the
/// circle through a, b, c (given counter-clockwise), 0 when cocircular.
inline int in_circle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const Wide adx = a.x - d.x, ady = a.y - d.y;
    const Wide bdx = b.x - d.x, bdy = b.y - d.y;
    const Wide cdx = c.x - d.x, cdy = c.y - d.y;
    const Wide alift = adx * adx + ady * ady;
    const Wide blift = bdx * bdx + bdy * bdy;
    const Wide clift = cdx * cdx + cdy * cdy;
    const Wide det = alift * (bdx * cdy - bdy * cdx) - blift * (adx * cdy - ady * cdx) +
                     clift * (adx * bdy - ady * bdx);
    return sign_of(det);
}

/// Same sign as in_circle; a floating-point filter decides the clear cases.
inline int in_circle_filtered(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    using F = long double;
    const F adx = F(a.x - d.x), ady = F(a.y - d.y);
    const F bdx = F(b.x - d.x), bdy = F(b.y - d.y);
    const F cdx = F(c.x - d.x), cdy = F(c.y - d.y);
    const F alift = adx * adx + ady * ady;
    const F blift = bdx * bdx + bdy * bdy;
    const F clift = cdx * cdx + cdy * cdy;
    const F bc = bdx * cdy - bdy * cdx;
    const F ac = adx * cdy - ady * cdx;
    const F ab = adx * bdy - ady * bdx;
    const F det = alift * bc - blift * ac + clift * ab;
    const F permanent = alift * (std::abs(bdx * cdy) + std::abs(bdy * cdx)) +
                        blift * (std::abs(adx * cdy) + std::abs(ady * cdx)) +
                        clift * (std::abs(adx * bdy) + std::abs(ady * bdx));
    if (std::abs(det) > permanent * F(1e-14)) return det > 0 ? 1 : -1;
    return in_circle(a, b, c, d);
}

/// Exact rational point (arrangement vertices, disk centers, ...).
struct RationalPoint {
    Rational x;
    Rational y;

    RationalPoint() = default;
    RationalPoint(Rational x_, Rational y_) : x(std::move(x_)), y(std::move(y_)) {}
    explicit RationalPoint(const Point2& p) : x(p.x), y(p.y) {}

    friend bool operator==(const RationalPoint&, const RationalPoint&) = default;
};

/// Conversion between user coordinates (decimal text) and the scaled lattice.
class CoordinateScale {
public:
    static constexpr std::int64_t kDefaultFactor = std::int64_t{1} << 20;

    explicit CoordinateScale(std::int64_t factor = kDefaultFactor) : factor_(factor) {
        if (factor_ <= 0) throw std::invalid_argument("coordinate scale must be positive");
    }

    /// Honors EPS_STREAM_SCALE when set.
    static CoordinateScale from_environment(std::int64_t fallback = kDefaultFactor) {
        if (const char* env = std::getenv("EPS_STREAM_SCALE"); env != nullptr && *env != '\0') {
            Rational v = parse_rational(env);
            if (denominator_of(v) != 1 || v <= 0) throw std::invalid_argument("EPS_STREAM_SCALE must be a positive integer");
            return CoordinateScale(numerator_of(v).convert_to<std::int64_t>());
        }
        return CoordinateScale(fallback);
    }

    std::int64_t factor() const { return factor_; }

    std::int64_t scale_value(const Rational& v) const {
        BigInt s = round_nearest(v * factor_);
        if (s > kMaxCoordinate || s < -kMaxCoordinate) throw ParseError("coordinate out of range");
        return s.convert_to<std::int64_t>();
    }

    Rational scale_exact(const Rational& v) const { return v * factor_; }

    /// Parses "x,y".
    Point2 parse_point(std::string_view line) const {
        auto comma = line.find(',');
        if (comma == std::string_view::npos) throw ParseError("expected x,y");
        return {scale_value(parse_rational(line.substr(0, comma))),
                scale_value(parse_rational(line.substr(comma + 1)))};
    }

    Rational to_user(const Rational& scaled) const { return scaled / factor_; }
    RationalPoint to_user(const RationalPoint& p) const { return {to_user(p.x), to_user(p.y)}; }
    RationalPoint to_user(const Point2& p) const { return to_user(RationalPoint(p)); }

    friend bool operator==(const CoordinateScale&, const CoordinateScale&) = default;

private:
    std::int64_t factor_;
};

}  // namespace epsstream
