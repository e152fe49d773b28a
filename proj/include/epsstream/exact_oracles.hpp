#pragma once

// Brute-force references. Each routine follows its definition directly and
// works on the raw point sequence (duplicates kept).

#include "epsstream/geometry.hpp"
#include "epsstream/lp2d.hpp"
#include "epsstream/range_families.hpp"
#include "epsstream/subsystem_oracle.hpp"
#include "epsstream/weighted_sample.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace epsstream::exact {

inline constexpr std::size_t kGeneralCap = 512;
inline constexpr std::size_t kRegressionCap = 60;
inline constexpr std::size_t kSimplicialCap = 25;
inline constexpr std::size_t kLmsCap = 96;

inline void check_size(std::size_t n, std::size_t cap, const char* what) {
    if (n > cap)
        throw CapExceeded(std::string(what) + " oracle refuses " + std::to_string(n) + " points (cap " + std::to_string(cap) +
                          ")");
}

inline std::uint64_t exact_count(std::span<const Point2> pts, const RangeDescriptor& r) {
    std::uint64_t c = 0;
    for (const Point2& p : pts) c += contains(r, p) ? 1 : 0;
    return c;
}

namespace detail {

struct Homogeneous {
    Wide x, y, w;  // (x / w, y / w), w > 0
};

inline Homogeneous homogenize(const RationalPoint& q) {
    const BigInt d = boost::multiprecision::lcm(denominator_of(q.x), denominator_of(q.y));
    const BigInt x = numerator_of(q.x) * (d / denominator_of(q.x));
    const BigInt y = numerator_of(q.y) * (d / denominator_of(q.y));
    return {Wide(x), Wide(y), Wide(d)};
}

/// Minimum count over closed halfplanes with q on the boundary, using
/// symbolically rotated normals n +- e*t for each direction t = p - q.
template <typename T>
std::uint64_t tukey_count(const std::vector<std::array<T, 2>>& d) {
    const std::size_t n = d.size();
    std::uint64_t best = n;
    bool any_direction = false;
    for (std::size_t i = 0; i < n; ++i) {
        const T tx = d[i][0], ty = d[i][1];
        if (tx == 0 && ty == 0) continue;
        any_direction = true;
        const T nx = -ty, ny = tx;
        std::uint64_t counts[4] = {0, 0, 0, 0};
        for (std::size_t k = 0; k < n; ++k) {
            const T s1 = d[k][0] * nx + d[k][1] * ny;
            const T s2 = d[k][0] * tx + d[k][1] * ty;
            const int a = sign_of(s1), b = sign_of(s2);
            // normals n + e t, n - e t, -n + e t, -n - e t
            const int signs[4][2] = {{a, b}, {a, -b}, {-a, b}, {-a, -b}};
            for (int v = 0; v < 4; ++v) {
                const int lead = signs[v][0] != 0 ? signs[v][0] : signs[v][1];
                counts[v] += lead >= 0 ? 1 : 0;
            }
        }
        for (std::uint64_t c : counts) best = std::min(best, c);
    }
    return any_direction ? best : n;
}

}  // namespace detail

/// Tukey depth of q as a fraction of |pts|.
inline Rational exact_tukey_depth(std::span<const Point2> pts, const RationalPoint& q) {
    if (pts.empty()) throw std::invalid_argument("tukey depth of an empty set");
    check_size(pts.size(), kGeneralCap, "tukey depth");
    std::uint64_t c;
    if (denominator_of(q.x) == 1 && denominator_of(q.y) == 1) {
        const Int128 qx = static_cast<Int128>(numerator_of(q.x).convert_to<long long>());
        const Int128 qy = static_cast<Int128>(numerator_of(q.y).convert_to<long long>());
        std::vector<std::array<Int128, 2>> d;
        for (const Point2& p : pts) d.push_back({Int128(p.x) - qx, Int128(p.y) - qy});
        c = detail::tukey_count(d);
    } else {
        const detail::Homogeneous h = detail::homogenize(q);
        std::vector<std::array<Wide, 2>> d;
        for (const Point2& p : pts) d.push_back({h.w * p.x - h.x, h.w * p.y - h.y});
        c = detail::tukey_count(d);
    }
    return Rational(static_cast<long long>(c), static_cast<long long>(pts.size()));
}

struct DeepestPoint {
    RationalPoint point;
    Rational depth;  // fraction of |pts|
};

/// Largest Tukey depth over the plane, with a witness point. Depth regions
/// are intersections of closed halfplanes bounded by lines through two data
/// points; the deepest nonempty one is found by an exact LP.
inline DeepestPoint exact_max_tukey_depth(std::span<const Point2> pts) {
    if (pts.empty()) throw std::invalid_argument("tukey depth of an empty set");
    check_size(pts.size(), kGeneralCap, "tukey depth");
    std::map<Point2, std::uint64_t> counts;
    for (const Point2& p : pts) ++counts[p];
    std::vector<Point2> loc;
    std::vector<std::uint64_t> mult;
    for (const auto& [p, c] : counts) {
        loc.push_back(p);
        mult.push_back(c);
    }
    const std::size_t m = loc.size();
    bool collinear = true;
    for (std::size_t k = 2; k < m && collinear; ++k) collinear = orient(loc[0], loc[1], loc[k]) == Orientation::Collinear;
    if (collinear) {
        DeepestPoint best{RationalPoint(loc[0]), Rational(-1)};
        for (const Point2& p : loc) {
            const Rational d = exact_tukey_depth(pts, RationalPoint(p));
            if (d > best.depth) best = {RationalPoint(p), d};
        }
        return best;
    }
    struct Side {
        LinearConstraint h;
        std::uint64_t mass;
    };
    std::vector<Side> sides;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            std::uint64_t left = 0, right = 0, on = 0;
            for (std::size_t k = 0; k < m; ++k) {
                const Int128 c = cross(loc[i], loc[j], loc[k]);
                (c > 0 ? left : c < 0 ? right : on) += mult[k];
            }
            // left side: cross(pi, pj, x) >= 0  <=>  -dy*x + dx*y >= -dy*xi + dx*yi
            const Rational dx = loc[j].x - loc[i].x, dy = loc[j].y - loc[i].y;
            const Rational c = -dy * loc[i].x + dx * loc[i].y;
            sides.push_back({{-dy, dx, c}, left + on});
            sides.push_back({{dy, -dx, -c}, right + on});
        }
    }
    std::vector<std::uint64_t> masses;
    for (const Side& s : sides) masses.push_back(s.mass);
    std::sort(masses.begin(), masses.end());
    masses.erase(std::unique(masses.begin(), masses.end()), masses.end());
    std::int64_t xlo = loc.front().x, xhi = loc.front().x, ylo = loc.front().y, yhi = loc.front().y;
    for (const Point2& p : loc) {
        xlo = std::min(xlo, p.x);
        xhi = std::max(xhi, p.x);
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
    }
    const Box box{Rational(xlo), Rational(xhi), Rational(ylo), Rational(yhi)};
    auto region = [&](std::size_t j) {
        std::vector<LinearConstraint> hs;
        for (const Side& s : sides)
            if (s.mass >= masses[j]) hs.push_back(s.h);
        return lexmin_feasible(hs, box);
    };
    // Smallest j whose region is nonempty; region 0 is empty for non-collinear data.
    std::size_t lo = 0, hi = masses.size() - 1;
    std::optional<RationalPoint> found = region(hi);
    if (!found) throw std::logic_error("depth region unexpectedly empty");
    while (lo + 1 < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (auto p = region(mid)) {
            hi = mid;
            found = std::move(p);
        } else {
            lo = mid;
        }
    }
    if (region(lo)) throw std::logic_error("all halfplanes share a point for non-collinear data");
    const Rational depth(static_cast<long long>(pts.size() - masses[lo]), static_cast<long long>(pts.size()));
    return {*found, depth};
}

/// Fraction of index triples whose closed triangle contains q.
inline Rational exact_simplicial_depth(std::span<const Point2> pts, const Point2& q) {
    const std::size_t n = pts.size();
    if (n < 3) throw std::invalid_argument("simplicial depth needs at least three points");
    check_size(n, kSimplicialCap, "simplicial depth");
    auto on_segment = [&](const Point2& a, const Point2& b) {
        return std::min(a.x, b.x) <= q.x && q.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= q.y &&
               q.y <= std::max(a.y, b.y);
    };
    std::uint64_t inside = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                ++total;
                const Point2 &a = pts[i], &b = pts[j], &c = pts[k];
                const int s1 = sign_of(cross(a, b, q)), s2 = sign_of(cross(b, c, q)), s3 = sign_of(cross(c, a, q));
                if (orient(a, b, c) == Orientation::Collinear) {
                    if (s1 == 0 && s2 == 0 && s3 == 0 && (on_segment(a, b) || on_segment(b, c) || on_segment(a, c))) ++inside;
                    continue;
                }
                if ((s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0)) ++inside;
            }
    return Rational(static_cast<long long>(inside), static_cast<long long>(total));
}

/// Regression depth of y = slope*x + intercept: the fewest points a rotation
/// about some pivot x = v must pass to turn the line vertical. Points on the
/// line count on both sides.
inline Rational exact_regression_depth(std::span<const Point2> pts, const Rational& slope, const Rational& intercept) {
    const std::size_t n = pts.size();
    if (n == 0) throw std::invalid_argument("regression depth of an empty set");
    check_size(n, kRegressionCap, "regression depth");
    std::vector<Rational> pivots;
    std::int64_t min_x = pts[0].x;
    for (const Point2& p : pts) {
        min_x = std::min(min_x, p.x);
        pivots.emplace_back(p.x);
        pivots.push_back(Rational(p.x) + make_rational(1, 2));
    }
    pivots.push_back(Rational(min_x) - 1);
    std::uint64_t best = n;
    for (const Rational& v : pivots) {
        std::uint64_t a = 0, b = 0;
        for (const Point2& p : pts) {
            const Rational r = Rational(p.y) - slope * p.x - intercept;
            const bool left = Rational(p.x) <= v;
            const bool up = r >= 0, down = r <= 0;
            a += (left ? up : down) ? 1 : 0;
            b += (left ? down : up) ? 1 : 0;
        }
        best = std::min({best, a, b});
    }
    return Rational(static_cast<long long>(best), static_cast<long long>(n));
}

/// Normalized rank of s among all pair slopes (vertical pairs rank above
/// everything, ties count one half, coincident pairs are skipped).
inline Rational exact_slope_rank(std::span<const Point2> pts, const Rational& s) {
    if (pts.size() < 2) throw std::invalid_argument("slope rank needs at least two points");
    check_size(pts.size(), kGeneralCap, "slope rank");
    std::uint64_t below2 = 0, pairs = 0;  // below2 counts halves
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (pts[i] == pts[j]) continue;
            ++pairs;
            if (pts[i].x == pts[j].x) continue;
            const Rational slope = ratio(BigInt(pts[j].y - pts[i].y), BigInt(pts[j].x - pts[i].x));
            below2 += slope < s ? 2 : slope == s ? 1 : 0;
        }
    if (pairs == 0) throw std::invalid_argument("all points coincide");
    return Rational(static_cast<long long>(below2), static_cast<long long>(2 * pairs));
}

struct LmsDisk {
    RationalPoint center;
    Rational r2;
    std::uint64_t count = 0;
};

/// Smallest closed disk through at most three points holding at least
/// fraction * n points.
inline LmsDisk exact_lms_disk(std::span<const Point2> pts, const Rational& fraction) {
    if (fraction <= 0 || fraction > 1) throw std::invalid_argument("fraction must lie in (0, 1]");
    if (pts.empty()) throw std::invalid_argument("lms of an empty set");
    check_size(pts.size(), kLmsCap, "lms");
    const Rational need = fraction * static_cast<long long>(pts.size());
    std::vector<Point2> loc(pts.begin(), pts.end());
    std::sort(loc.begin(), loc.end());
    loc.erase(std::unique(loc.begin(), loc.end()), loc.end());
    std::optional<LmsDisk> best;
    auto offer = [&](const RationalPoint& c, const Rational& r2, std::uint64_t count) {
        if (Rational(static_cast<long long>(count)) < need) return;
        if (!best || r2 < best->r2) best = LmsDisk{c, r2, count};
    };
    for (const Point2& a : loc) {
        std::uint64_t c = 0;
        for (const Point2& p : pts) c += p == a;
        offer(RationalPoint(a), 0, c);
    }
    for (std::size_t i = 0; i < loc.size(); ++i)
        for (std::size_t j = i + 1; j < loc.size(); ++j) {
            const Point2 &a = loc[i], &b = loc[j];
            std::uint64_t c = 0;
            for (const Point2& p : pts) c += dot(p, a, b) <= 0;
            const Rational dx = b.x - a.x, dy = b.y - a.y;
            offer(RationalPoint(Rational(a.x + b.x) / 2, Rational(a.y + b.y) / 2), (dx * dx + dy * dy) / 4, c);
        }
    for (std::size_t i = 0; i < loc.size(); ++i)
        for (std::size_t j = i + 1; j < loc.size(); ++j)
            for (std::size_t k = j + 1; k < loc.size(); ++k) {
                const Point2 &a = loc[i], &b = loc[j], &cc = loc[k];
                const Wide bx = b.x - a.x, by = b.y - a.y, cx = cc.x - a.x, cy = cc.y - a.y;
                const Wide d = 2 * (bx * cy - by * cx);
                if (d == 0) continue;
                const Wide b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
                const Wide ux = cy * b2 - by * c2, uy = bx * c2 - cx * b2;
                const Wide u2 = ux * ux + uy * uy;
                std::uint64_t c = 0;
                for (const Point2& p : pts) {
                    const Wide px = d * (p.x - a.x) - ux, py = d * (p.y - a.y) - uy;
                    c += px * px + py * py <= u2;
                }
                const Rational dd(BigInt(d.str()));
                const Rational center_x = Rational(a.x) + Rational(BigInt(ux.str())) / dd;
                const Rational center_y = Rational(a.y) + Rational(BigInt(uy.str())) / dd;
                offer(RationalPoint(center_x, center_y), Rational(BigInt(u2.str())) / (dd * dd), c);
            }
    if (!best) throw std::invalid_argument("no canonical disk reaches the requested fraction");
    return *best;
}

struct LmsSlab {
    Rational slope;
    Rational intercept;  // central line
    Rational width;      // vertical separation
    std::uint64_t count = 0;
};

/// Narrowest vertical-width slab with one boundary through two points and the
/// other through a third (or one point for slope 0), holding at least
/// fraction * n points.
inline LmsSlab exact_lms_slab(std::span<const Point2> pts, const Rational& fraction) {
    if (fraction <= 0 || fraction > 1) throw std::invalid_argument("fraction must lie in (0, 1]");
    if (pts.empty()) throw std::invalid_argument("lms of an empty set");
    check_size(pts.size(), kLmsCap, "lms");
    const Rational need = fraction * static_cast<long long>(pts.size());
    std::vector<Point2> loc(pts.begin(), pts.end());
    std::sort(loc.begin(), loc.end());
    loc.erase(std::unique(loc.begin(), loc.end()), loc.end());
    std::vector<std::pair<std::int64_t, std::int64_t>> slopes{{0, 1}};  // (dy, dx), dx > 0
    for (std::size_t i = 0; i < loc.size(); ++i)
        for (std::size_t j = i + 1; j < loc.size(); ++j)
            if (loc[i].x != loc[j].x) slopes.emplace_back(loc[j].y - loc[i].y, loc[j].x - loc[i].x);
    std::optional<LmsSlab> best;
    std::vector<Int128> keys;
    for (const auto& [dy, dx] : slopes) {
        keys.clear();
        for (const Point2& p : pts) keys.push_back(Int128(dx) * p.y - Int128(dy) * p.x);
        std::sort(keys.begin(), keys.end());
        std::vector<Int128> bases;
        for (const Point2& p : loc) bases.push_back(Int128(dx) * p.y - Int128(dy) * p.x);
        std::sort(bases.begin(), bases.end());
        bases.erase(std::unique(bases.begin(), bases.end()), bases.end());
        for (std::size_t i = 0; i < bases.size(); ++i)
            for (std::size_t k = i; k < bases.size(); ++k) {
                const auto first = std::lower_bound(keys.begin(), keys.end(), bases[i]);
                const auto last = std::upper_bound(keys.begin(), keys.end(), bases[k]);
                const auto count = static_cast<std::uint64_t>(last - first);
                if (Rational(static_cast<long long>(count)) < need) continue;
                const Rational width(BigInt(static_cast<long long>(bases[k] - bases[i])), BigInt(dx));
                if (!best || width < best->width) {
                    const Rational mid = (Rational(BigInt(static_cast<long long>(bases[i]))) +
                                          Rational(BigInt(static_cast<long long>(bases[k])))) /
                                         (2 * Rational(dx));
                    best = LmsSlab{Rational(BigInt(dy), BigInt(dx)), mid, width, count};
                }
                break;  // wider windows from the same start cannot be narrower
            }
    }
    if (!best) throw std::invalid_argument("no canonical slab reaches the requested fraction");
    return *best;
}

/// max over induced ranges of the union of supports of
/// |candidate(R) - ground(R)| / ground total, with exact integer sums.
inline Rational exact_discrepancy(const WeightedSample& ground, const WeightedSample& candidate, const RangeFamily& family) {
    std::map<Point2, Rational> delta;
    Rational total = 0;
    for (std::size_t i = 0; i < ground.points.size(); ++i) {
        delta[ground.points[i]] -= ground.weights[i];
        total += ground.weights[i];
    }
    for (std::size_t i = 0; i < candidate.points.size(); ++i) delta[candidate.points[i]] += candidate.weights[i];
    if (total == 0) throw std::invalid_argument("ground has no mass");
    std::vector<Point2> support;
    std::vector<Rational> values;
    for (const auto& [p, v] : delta) {
        support.push_back(p);
        values.push_back(v);
    }
    check_size(support.size(), kGeneralCap, "discrepancy");
    const SubsetTable table = subsystem_oracle(family, support);
    BigInt den = 1;
    for (const Rational& v : values) den = boost::multiprecision::lcm(den, denominator_of(v));
    std::vector<BigInt> scaled;
    for (const Rational& v : values) scaled.push_back(numerator_of(v) * (den / denominator_of(v)));
    BigInt worst = 0;
    std::vector<std::size_t> members;
    for (std::size_t r = 0; r < table.size(); ++r) {
        BigInt s = 0;
        for (std::size_t i : table.members(r)) s += scaled[i];
        if (s < 0) s = -s;
        if (s > worst) worst = s;
    }
    return Rational(worst, den) / total;
}

inline Rational exact_discrepancy(std::span<const Point2> ground, const WeightedSample& candidate, const RangeFamily& family) {
    WeightedSample g;
    for (const Point2& p : ground) {
        g.points.push_back(p);
        g.weights.emplace_back(1);
    }
    g.total_weight = Rational(static_cast<long long>(ground.size()));
    return exact_discrepancy(g, candidate, family);
}

}  // namespace epsstream::exact
