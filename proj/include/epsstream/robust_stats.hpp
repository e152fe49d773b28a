#pragma once

// Depth and robust-regression estimators evaluated on a snapshot. Every
// quantity is the exact value on the weighted sample; the additive bounds
// carry the sample's guarantee over to the stream.

#include "epsstream/lp2d.hpp"
#include "epsstream/range_queries.hpp"
#include "epsstream/stream_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace epsstream {

/// Measured on exact samples; see the acceptance suite.
inline constexpr long double kSimplicialK = 3.0L;
inline constexpr long double kSlopeRankK = 2.0L;

struct DepthValue {
    Rational value;
    Rational additive_bound;
};

/// y = slope * x + intercept in lattice coordinates.
struct FitLine {
    Rational slope;
    Rational intercept;

    friend bool operator==(const FitLine&, const FitLine&) = default;
};

struct TukeyMedian {
    RationalPoint point;
    DepthValue depth;
};

struct RegressionFit {
    FitLine line;
    DepthValue depth;
};

struct LmsLocation {
    RationalPoint center;
    Rational radius2;  // squared radius
    Rational mass;     // snapshot weight inside
};

struct LmsRegression {
    FitLine line;  // central line
    Rational width;
    Rational mass;
};

namespace stats_detail {

inline void require_kind(const Snapshot& snap, FamilyKind kind) {
    if (snap.config.family.kind != kind)
        throw FamilyMismatch("statistic needs a '" + std::string(family_name(kind)) + "' snapshot, got '" +
                             std::string(snap.config.family.name()) + "'");
}

/// Runs f(weights, denominator) with the sample weights scaled to integers:
/// Int128 when the total stays small, BigInt otherwise.
template <typename F>
auto with_integer_weights(const WeightedSample& s, F&& f) {
    BigInt den = 1;
    for (const Rational& w : s.weights) den = boost::multiprecision::lcm(den, denominator_of(w));
    std::vector<BigInt> big;
    BigInt total = 0;
    for (const Rational& w : s.weights) {
        big.push_back(numerator_of(w) * (den / denominator_of(w)));
        total += big.back();
    }
    if (total < (BigInt(1) << 100)) {
        std::vector<Int128> small;
        for (const BigInt& b : big) small.push_back(sampler_detail::to_int128(b));
        return f(small, den);
    }
    return f(big, den);
}

inline Rational as_rational(const Int128& v, const BigInt& den) {
    BigInt b = 0;
    const bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    b = static_cast<std::uint64_t>(u >> 64);
    b <<= 64;
    b += static_cast<std::uint64_t>(u);
    return Rational(neg ? BigInt(-b) : b, den);
}

inline Rational as_rational(const BigInt& v, const BigInt& den) { return Rational(v, den); }

/// Upper rational bound on k * x^(1/root) for x in (0, 1].
inline Rational root_bound(long double k, const Rational& x, int root) {
    const long double v = root == 2 ? std::sqrt(to_long_double(x)) : std::cbrt(to_long_double(x));
    return engine_detail::rational_above(k * v * (1.0L + 1e-12L));
}

/// Smallest mass over closed halfplanes with the origin on the boundary;
/// d holds the points relative to the query.
template <typename T, typename W>
W tukey_min_mass(const std::vector<std::array<T, 2>>& d, const std::vector<W>& w, const W& total) {
    std::optional<W> best;
    W at_q = 0;
    for (std::size_t k = 0; k < d.size(); ++k)
        if (d[k][0] == 0 && d[k][1] == 0) at_q += w[k];
    for (std::size_t i = 0; i < d.size(); ++i) {
        const T& tx = d[i][0];
        const T& ty = d[i][1];
        if (tx == 0 && ty == 0) continue;
        W left = 0, right = 0, forward = 0, backward = 0;
        for (std::size_t k = 0; k < d.size(); ++k) {
            const T c = tx * d[k][1] - ty * d[k][0];
            if (c > 0) {
                left += w[k];
            } else if (c < 0) {
                right += w[k];
            } else {
                const T along = tx * d[k][0] + ty * d[k][1];
                if (along > 0) forward += w[k];
                if (along < 0) backward += w[k];
            }
        }
        W m = std::min(left, right) + at_q + std::min(forward, backward);
        if (!best || m < *best) best = std::move(m);
    }
    return best ? *best : total;
}

template <typename W>
Rational tukey_depth_fraction(const WeightedSample& s, const std::vector<W>& w, const BigInt& den, const RationalPoint& q) {
    W total = 0;
    for (const W& x : w) total += x;
    W m;
    if (denominator_of(q.x) == 1 && denominator_of(q.y) == 1 && abs(numerator_of(q.x)) <= kMaxCoordinate &&
        abs(numerator_of(q.y)) <= kMaxCoordinate) {
        const Int128 qx = numerator_of(q.x).convert_to<long long>(), qy = numerator_of(q.y).convert_to<long long>();
        std::vector<std::array<Int128, 2>> d;
        for (const Point2& p : s.points) d.push_back({Int128(p.x) - qx, Int128(p.y) - qy});
        m = tukey_min_mass(d, w, total);
    } else {
        const BigInt h = boost::multiprecision::lcm(denominator_of(q.x), denominator_of(q.y));
        const Wide hx(numerator_of(q.x) * (h / denominator_of(q.x))), hy(numerator_of(q.y) * (h / denominator_of(q.y)));
        const Wide hw(h);
        std::vector<std::array<Wide, 2>> d;
        for (const Point2& p : s.points) d.push_back({hw * p.x - hx, hw * p.y - hy});
        m = tukey_min_mass(d, w, total);
    }
    return as_rational(m, den) / as_rational(total, den);
}

/// Binomial polynomial w(w-1)...(w-k+1)/k!, clamped at zero.
inline Rational choose(const Rational& w, int k) {
    Rational v = 1;
    for (int i = 0; i < k; ++i) v *= w - i;
    for (int i = 2; i <= k; ++i) v /= i;
    return v < 0 ? Rational(0) : v;
}

/// True when a lies before b in angular order over [0, pi), both given in
/// that half-turn.
inline bool angle_less(const std::array<Int128, 2>& a, const std::array<Int128, 2>& b) {
    return a[0] * b[1] - a[1] * b[0] > 0;
}

inline Rational residual(const Point2& p, const FitLine& l) { return Rational(p.y) - l.slope * p.x - l.intercept; }

}  // namespace stats_detail

// ---------------------------------------------------------------- Tukey

inline DepthValue tukey_depth(const Snapshot& snap, const RationalPoint& q) {
    stats_detail::require_kind(snap, FamilyKind::Halfplane);
    const Rational v = stats_detail::with_integer_weights(snap.sample, [&](const auto& w, const BigInt& den) {
        return stats_detail::tukey_depth_fraction(snap.sample, w, den, q);
    });
    return {v, snap.sample.eps_bound};
}

inline DepthValue tukey_depth(const Snapshot& snap, const Point2& q) { return tukey_depth(snap, RationalPoint(q)); }

/// Deepest point of the snapshot: the lexicographically smallest point of the
/// deepest nonempty intersection of closed halfplanes bounded by support
/// pair lines.
inline TukeyMedian tukey_median(const Snapshot& snap) {
    stats_detail::require_kind(snap, FamilyKind::Halfplane);
    const WeightedSample& s = snap.sample;
    if (s.empty()) throw std::invalid_argument("tukey median of an empty snapshot");
    const std::size_t m = s.size();
    bool collinear = true;
    for (std::size_t k = 2; k < m && collinear; ++k) collinear = cross(s.points[0], s.points[1], s.points[k]) == 0;
    if (collinear) {
        std::optional<TukeyMedian> best;
        for (const Point2& p : s.points) {
            DepthValue d = tukey_depth(snap, p);
            if (!best || d.value > best->depth.value) best = TukeyMedian{RationalPoint(p), std::move(d)};
        }
        return *best;
    }
    const RationalPoint point = stats_detail::with_integer_weights(s, [&](const auto& w, const BigInt&) {
        using W = std::decay_t<decltype(w[0])>;
        std::vector<std::pair<LinearConstraint, W>> sides;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                W left = 0, right = 0, on = 0;
                for (std::size_t k = 0; k < m; ++k) {
                    const Int128 c = cross(s.points[i], s.points[j], s.points[k]);
                    (c > 0 ? left : c < 0 ? right : on) += w[k];
                }
                const Point2 &a = s.points[i], &b = s.points[j];
                const Rational nx = -(b.y - a.y), ny = b.x - a.x;
                const Rational c = nx * a.x + ny * a.y;
                sides.push_back({{nx, ny, c}, left + on});
                sides.push_back({{-nx, -ny, -c}, right + on});
            }
        std::vector<W> masses;
        for (const auto& sd : sides) masses.push_back(sd.second);
        std::sort(masses.begin(), masses.end());
        masses.erase(std::unique(masses.begin(), masses.end()), masses.end());
        std::int64_t xlo = s.points[0].x, xhi = xlo, ylo = s.points[0].y, yhi = ylo;
        for (const Point2& p : s.points) {
            xlo = std::min(xlo, p.x);
            xhi = std::max(xhi, p.x);
            ylo = std::min(ylo, p.y);
            yhi = std::max(yhi, p.y);
        }
        const Box box{Rational(xlo), Rational(xhi), Rational(ylo), Rational(yhi)};
        auto region = [&](std::size_t j) {
            std::vector<LinearConstraint> hs;
            for (const auto& sd : sides)
                if (sd.second >= masses[j]) hs.push_back(sd.first);
            return lexmin_feasible(hs, box);
        };
        // region(0) is empty for non-collinear support, the last one is not
        std::size_t lo = 0, hi = masses.size() - 1;
        std::optional<RationalPoint> found = region(hi);
        if (!found) throw std::logic_error("deepest region unexpectedly empty");
        while (lo + 1 < hi) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (auto p = region(mid)) {
                hi = mid;
                found = std::move(p);
            } else {
                lo = mid;
            }
        }
        return *found;
    });
    return {point, tukey_depth(snap, point)};
}

// ----------------------------------------------------------- Simplicial

/// Wedge-count estimate of the simplicial depth of q. Lines through q are
/// placed by an angular sweep so each double wedge holds at most
/// delta_sub * n of the weight (unless one direction alone holds more).
inline DepthValue simplicial_depth_estimate(const Snapshot& snap, const Point2& q, std::optional<Rational> delta_sub = {}) {
    stats_detail::require_kind(snap, FamilyKind::Wedge);
    const Rational& eps = snap.sample.eps_bound;
    Rational delta;
    if (delta_sub) {
        delta = *delta_sub;
        if (delta <= 0 || delta >= 1) throw std::invalid_argument("delta_sub must lie in (0, 1)");
    } else {
        delta = engine_detail::rational_below(std::sqrt(to_long_double(eps)));
        if (delta <= 0) delta = eps;
    }
    const WeightedSample& s = snap.sample;
    const Rational n(snap.n);
    const Rational bound = std::min(Rational(1), stats_detail::root_bound(kSimplicialK, eps, 2));
    if (snap.n < 3) throw std::invalid_argument("simplicial depth needs at least three points");

    struct Dir {
        std::array<Int128, 2> half;  // direction folded into [0, pi)
        bool upper;
        Rational w;
    };
    std::vector<Dir> dirs;
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::array<Int128, 2> d{Int128(s.points[i].x) - q.x, Int128(s.points[i].y) - q.y};
        if (d[0] == 0 && d[1] == 0) continue;
        const bool upper = d[1] > 0 || (d[1] == 0 && d[0] > 0);
        if (!upper) d = {-d[0], -d[1]};
        dirs.push_back({d, upper, s.weights[i]});
    }
    std::stable_sort(dirs.begin(), dirs.end(), [](const Dir& a, const Dir& b) { return stats_detail::angle_less(a.half, b.half); });
    // group equal directions, then pack groups into double wedges
    std::vector<std::size_t> wedge_of(dirs.size());
    std::size_t groups = 0;
    {
        Rational load = 0;
        std::size_t i = 0;
        while (i < dirs.size()) {
            std::size_t j = i;
            Rational gw = 0;
            while (j < dirs.size() && dirs[j].half[0] * dirs[i].half[1] - dirs[j].half[1] * dirs[i].half[0] == 0) gw += dirs[j++].w;
            if (groups == 0 || (load > 0 && load + gw > delta * n)) {
                ++groups;
                load = 0;
            }
            load += gw;
            for (std::size_t k = i; k < j; ++k) wedge_of[k] = groups - 1;
            i = j;
        }
    }
    if (groups == 0) return {Rational(1), bound};  // every point sits at q
    const std::size_t lines = groups, wedges = 2 * lines;
    std::vector<Rational> w(wedges, Rational(0));
    for (std::size_t k = 0; k < dirs.size(); ++k) w[wedge_of[k] + (dirs[k].upper ? 0 : lines)] += dirs[k].w;
    Rational excluded = 0;
    for (std::size_t i = 0; i < wedges; ++i) {
        Rational h = 0;
        for (std::size_t t = 0; t < lines; ++t) h += w[(i + wedges - t) % wedges];
        const Rational rest = h - w[i];
        excluded += stats_detail::choose(w[i], 3) + stats_detail::choose(w[i], 2) * rest + w[i] * stats_detail::choose(rest, 2);
    }
    Rational value = 1 - excluded / stats_detail::choose(n, 3);
    value = std::clamp(value, Rational(0), Rational(1));
    return {value, bound};
}

// ----------------------------------------------------------- Regression

/// Fewest weight a rotation about a vertical pivot must cross to turn l
/// vertical, over n. Points on l count on both sides.
inline DepthValue regression_depth(const Snapshot& snap, const FitLine& l) {
    stats_detail::require_kind(snap, FamilyKind::DoubleWedge);
    const WeightedSample& s = snap.sample;
    // support is sorted by x, so prefixes are the pivot splits
    Rational up_total = 0, down_total = 0;
    std::vector<int> sign(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        sign[i] = sign_of(stats_detail::residual(s.points[i], l));
        if (sign[i] >= 0) up_total += s.weights[i];
        if (sign[i] <= 0) down_total += s.weights[i];
    }
    Rational up_left = 0, down_left = 0;
    Rational best = std::min(up_total, down_total);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (sign[i] >= 0) up_left += s.weights[i];
        if (sign[i] <= 0) down_left += s.weights[i];
        if (i + 1 < s.size() && s.points[i + 1].x == s.points[i].x) continue;
        best = std::min({best, Rational(up_left + (down_total - down_left)), Rational(down_left + (up_total - up_left))});
    }
    return {best / Rational(snap.n), snap.sample.eps_bound};
}

/// Deepest line among those through two support points (horizontal lines
/// through support points when all share one x).
inline RegressionFit max_regression_depth_fit(const Snapshot& snap) {
    stats_detail::require_kind(snap, FamilyKind::DoubleWedge);
    const WeightedSample& s = snap.sample;
    if (s.empty()) throw std::invalid_argument("regression fit of an empty snapshot");
    std::optional<RegressionFit> best;
    auto offer = [&](const FitLine& l) {
        DepthValue d = regression_depth(snap, l);
        if (!best || d.value > best->depth.value) best = RegressionFit{l, std::move(d)};
    };
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            const Point2 &a = s.points[i], &b = s.points[j];
            if (a.x == b.x) continue;
            const Rational slope = ratio(BigInt(b.y - a.y), BigInt(b.x - a.x));
            offer({slope, Rational(a.y) - slope * a.x});
        }
    if (!best)
        for (const Point2& p : s.points) offer({0, Rational(p.y)});
    return *best;
}

// ------------------------------------------------------------ Theil-Sen

/// Weighted rank of s among support pair slopes; vertical pairs rank above
/// every slope, ties count half.
inline DepthValue slope_rank_estimate(const Snapshot& snap, const Rational& slope) {
    stats_detail::require_kind(snap, FamilyKind::VParallelogram);
    const WeightedSample& s = snap.sample;
    Rational below = 0, total = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            const Rational g = s.weights[i] * s.weights[j];
            total += g;
            if (s.points[i].x == s.points[j].x) continue;
            const Rational ps = ratio(BigInt(s.points[j].y - s.points[i].y), BigInt(s.points[j].x - s.points[i].x));
            if (ps < slope)
                below += g;
            else if (ps == slope)
                below += g / 2;
        }
    if (total == 0) throw std::invalid_argument("slope rank needs two distinct support points");
    const Rational bound = std::min(Rational(1), stats_detail::root_bound(kSlopeRankK, snap.sample.eps_bound, 3));
    return {below / total, bound};
}

/// Lower weighted median pair slope, then the lower weighted median
/// residual as intercept.
inline FitLine theil_sen_fit(const Snapshot& snap) {
    stats_detail::require_kind(snap, FamilyKind::VParallelogram);
    const WeightedSample& s = snap.sample;
    if (s.size() < 2) throw std::invalid_argument("theil-sen needs two distinct support points");
    std::vector<std::pair<Rational, Rational>> slopes;  // (slope, pair weight)
    Rational total = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            const Rational g = s.weights[i] * s.weights[j];
            total += g;
            if (s.points[i].x != s.points[j].x)
                slopes.emplace_back(ratio(BigInt(s.points[j].y - s.points[i].y), BigInt(s.points[j].x - s.points[i].x)), g);
        }
    std::sort(slopes.begin(), slopes.end());
    std::optional<Rational> median;
    Rational acc = 0;
    for (const auto& [sl, g] : slopes) {
        acc += g;
        if (2 * acc >= total) {
            median = sl;
            break;
        }
    }
    if (!median) throw std::invalid_argument("median pair slope is vertical");
    std::vector<std::pair<Rational, Rational>> res;
    for (std::size_t i = 0; i < s.size(); ++i) res.emplace_back(Rational(s.points[i].y) - *median * s.points[i].x, s.weights[i]);
    std::sort(res.begin(), res.end());
    acc = 0;
    for (const auto& [r, w] : res) {
        acc += w;
        if (2 * acc >= s.total_weight) return {*median, r};
    }
    return {*median, res.back().first};
}

// ------------------------------------------------------------------ LMS

namespace stats_detail {

inline Rational lms_threshold(const Snapshot& snap) {
    const Rational& eps = snap.sample.eps_bound;
    if (eps >= make_rational(1, 2)) throw std::invalid_argument("least-median estimators need eps < 1/2");
    return (make_rational(1, 2) + eps) * Rational(snap.n);
}

}  // namespace stats_detail

/// Smallest disk through at most three support points whose weight reaches
/// (1/2 + eps) n.
inline LmsLocation lms_location(const Snapshot& snap) {
    stats_detail::require_kind(snap, FamilyKind::Disk);
    const WeightedSample& s = snap.sample;
    if (s.empty()) throw std::invalid_argument("lms of an empty snapshot");
    const Rational need = stats_detail::lms_threshold(snap);
    return stats_detail::with_integer_weights(s, [&](const auto& w, const BigInt& den) {
        using W = std::decay_t<decltype(w[0])>;
        const std::size_t m = s.size();
        const Rational need_scaled = need * Rational(den);
        std::optional<LmsLocation> best;
        long double best_approx = std::numeric_limits<long double>::infinity();
        auto enough = [&](const W& mass) { return stats_detail::as_rational(mass, 1) >= need_scaled; };
        auto offer = [&](RationalPoint c, Rational r2, const W& mass) {
            if (!enough(mass)) return;
            if (!best || r2 < best->radius2) {
                best_approx = to_long_double(r2);
                best = LmsLocation{std::move(c), std::move(r2), stats_detail::as_rational(mass, den)};
            }
        };
        for (std::size_t i = 0; i < m; ++i) offer(RationalPoint(s.points[i]), 0, w[i]);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                const Point2 &a = s.points[i], &b = s.points[j];
                const Int128 dx = b.x - a.x, dy = b.y - a.y;
                const long double approx = (static_cast<long double>(dx) * dx + static_cast<long double>(dy) * dy) / 4;
                if (approx > best_approx * (1 + 1e-9L)) continue;
                W mass = 0;
                for (std::size_t k = 0; k < m; ++k)
                    if (dot(s.points[k], a, b) <= 0) mass += w[k];
                offer(RationalPoint(Rational(a.x + b.x) / 2, Rational(a.y + b.y) / 2),
                      Rational(BigInt(static_cast<long long>(dx * dx + dy * dy)), BigInt(4)), mass);
            }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                for (std::size_t k = j + 1; k < m; ++k) {
                    Point2 a = s.points[i], b = s.points[j], c = s.points[k];
                    const Orientation o = orient(a, b, c);
                    if (o == Orientation::Collinear) continue;
                    if (o == Orientation::CW) std::swap(b, c);
                    using F = long double;
                    const F bx = F(b.x - a.x), by = F(b.y - a.y), cx = F(c.x - a.x), cy = F(c.y - a.y);
                    const F d = 2 * (bx * cy - by * cx);
                    const F ux = (cy * (bx * bx + by * by) - by * (cx * cx + cy * cy)) / d;
                    const F uy = (bx * (cx * cx + cy * cy) - cx * (bx * bx + by * by)) / d;
                    if (ux * ux + uy * uy > best_approx * (1 + 1e-9L)) continue;
                    W mass = 0;
                    for (std::size_t t = 0; t < m; ++t)
                        if (in_circle_filtered(a, b, c, s.points[t]) >= 0) mass += w[t];
                    if (!enough(mass)) continue;
                    const Rational rbx = b.x - a.x, rby = b.y - a.y, rcx = c.x - a.x, rcy = c.y - a.y;
                    const Rational rd = 2 * (rbx * rcy - rby * rcx);
                    const Rational b2 = rbx * rbx + rby * rby, c2 = rcx * rcx + rcy * rcy;
                    const Rational ex = (rcy * b2 - rby * c2) / rd, ey = (rbx * c2 - rcx * b2) / rd;
                    offer(RationalPoint(Rational(a.x) + ex, Rational(a.y) + ey), ex * ex + ey * ey, mass);
                }
        return *best;
    });
}

/// Narrowest slab (vertical width) whose weight reaches (1/2 + eps) n,
/// over slopes of support pairs and slope 0.
inline LmsRegression lms_regression(const Snapshot& snap) {
    stats_detail::require_kind(snap, FamilyKind::Slab);
    const WeightedSample& s = snap.sample;
    if (s.empty()) throw std::invalid_argument("lms of an empty snapshot");
    const Rational need = stats_detail::lms_threshold(snap);
    return stats_detail::with_integer_weights(s, [&](const auto& w, const BigInt& den) {
        using W = std::decay_t<decltype(w[0])>;
        const std::size_t m = s.size();
        const Rational need_scaled = need * Rational(den);
        std::vector<std::pair<std::int64_t, std::int64_t>> slopes{{0, 1}};  // (dy, dx), dx > 0
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                if (s.points[i].x != s.points[j].x) {
                    std::int64_t dy = s.points[j].y - s.points[i].y, dx = s.points[j].x - s.points[i].x;
                    if (dx < 0) {
                        dx = -dx;
                        dy = -dy;
                    }
                    const std::int64_t g = std::gcd(dy, dx);
                    slopes.emplace_back(dy / g, dx / g);
                }
        std::sort(slopes.begin() + 1, slopes.end(), [](const auto& a, const auto& b) {
            return Int128(a.first) * b.second < Int128(b.first) * a.second;
        });
        slopes.erase(std::unique(slopes.begin(), slopes.end()), slopes.end());
        std::optional<LmsRegression> best;
        std::vector<std::pair<Int128, std::size_t>> keys(m);
        for (const auto& [dy, dx] : slopes) {
            for (std::size_t i = 0; i < m; ++i) keys[i] = {Int128(dx) * s.points[i].y - Int128(dy) * s.points[i].x, i};
            std::sort(keys.begin(), keys.end());
            // two pointers: for each left end the shortest window reaching the mass
            W mass = 0;
            std::size_t r = 0;
            for (std::size_t l = 0; l < m; ++l) {
                while (r < m && stats_detail::as_rational(mass, 1) < need_scaled) mass += w[keys[r++].second];
                if (stats_detail::as_rational(mass, 1) < need_scaled) break;
                const Int128 lo = keys[l].first, hi = keys[r - 1].first;
                const Rational width = stats_detail::as_rational(hi - lo, BigInt(dx));
                if (!best || width < best->width) {
                    const Rational mid = stats_detail::as_rational(lo + hi, BigInt(2 * dx));
                    best = LmsRegression{{Rational(BigInt(dy), BigInt(dx)), mid}, width, stats_detail::as_rational(mass, den)};
                }
                mass -= w[keys[l].second];
            }
        }
        return *best;
    });
}

}  // namespace epsstream
