#pragma once

// Subsystem oracle: lists every distinct subset {R ∩ Y : R in family} of a
// finite point sequence Y, by index. Also produces canonical witness
// descriptors that realize all of those subsets.
//
// The enumeration schemes:
//   halfplane  - lines through two distinct locations; points on the line are
//                taken as any prefix or suffix along it (small rotations).
//   quadrant   - apexes on the grid of distinct coordinates (plus one past max).
//   wedge      - pairwise intersections of halfplane subsets.
//   dwedge     - pairwise symmetric differences of halfplane subsets.
//   disk       - halfplane subsets (huge disks), singletons, and circles through
//                three locations with cocircular points cut by a halfplane.
//   slab       - for a generic slope between consecutive critical slopes, all
//                contiguous runs of the order by y - a*x.
//   vpar       - slab subsets of every contiguous run of distinct x values.

#include "epsstream/geometry.hpp"
#include "epsstream/range_families.hpp"
#include "epsstream/subset_table.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace epsstream {

namespace oracle_detail {

/// Distinct locations of Y in sorted order, with the index bitset of each.
struct Locations {
    std::vector<Point2> points;
    std::vector<RowBits> bits;
    std::size_t words = 1;
};

inline Locations group_locations(std::span<const Point2> ys, std::size_t words) {
    std::map<Point2, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < ys.size(); ++i) groups[ys[i]].push_back(i);
    Locations out;
    out.words = words;
    for (const auto& [p, idx] : groups) {
        out.points.push_back(p);
        RowBits b(words);
        for (std::size_t i : idx) b.set(i);
        out.bits.push_back(std::move(b));
    }
    return out;
}

inline Locations subset_of(const Locations& all, std::span<const std::size_t> which) {
    Locations out;
    out.words = all.words;
    for (std::size_t k : which) {
        out.points.push_back(all.points[k]);
        out.bits.push_back(all.bits[k]);
    }
    return out;
}

template <typename Emit>
void enumerate_halfplanes(const Locations& loc, Emit&& emit) {
    RowBits acc(loc.words);
    emit(acc);
    for (const RowBits& b : loc.bits) acc |= b;
    emit(acc);
    const std::size_t n = loc.points.size();
    std::vector<std::pair<Int128, std::size_t>> on;
    RowBits left(loc.words), right(loc.words);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point2& a = loc.points[i];
            const Point2& b = loc.points[j];
            left.clear();
            right.clear();
            on.clear();
            for (std::size_t k = 0; k < n; ++k) {
                const Int128 c = cross(a, b, loc.points[k]);
                if (c > 0)
                    left |= loc.bits[k];
                else if (c < 0)
                    right |= loc.bits[k];
                else
                    on.emplace_back(dot(a, b, loc.points[k]), k);
            }
            std::sort(on.begin(), on.end());
            for (const RowBits* side : {&left, &right}) {
                acc = *side;
                emit(acc);
                for (const auto& entry : on) {
                    acc |= loc.bits[entry.second];
                    emit(acc);
                }
                acc = *side;
                for (auto it = on.rbegin(); it != on.rend(); ++it) {
                    acc |= loc.bits[it->second];
                    emit(acc);
                }
            }
        }
    }
}

template <typename Emit>
void enumerate_quadrants(const Locations& loc, Emit&& emit) {
    std::vector<std::int64_t> xs, ys;
    for (const Point2& p : loc.points) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    RowBits empty(loc.words);
    emit(empty);
    std::vector<RowBits> by_x, by_y;
    for (std::int64_t px : xs) {
        RowBits b(loc.words);
        for (std::size_t k = 0; k < loc.points.size(); ++k)
            if (loc.points[k].x >= px) b |= loc.bits[k];
        by_x.push_back(std::move(b));
    }
    for (std::int64_t qy : ys) {
        RowBits b(loc.words);
        for (std::size_t k = 0; k < loc.points.size(); ++k)
            if (loc.points[k].y >= qy) b |= loc.bits[k];
        by_y.push_back(std::move(b));
    }
    RowBits acc(loc.words);
    for (const RowBits& bx : by_x) {
        for (const RowBits& by : by_y) {
            auto& w = acc.words();
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = bx.span()[i] & by.span()[i];
            emit(acc);
        }
    }
}

/// Slopes strictly between consecutive critical slopes (and beyond both
/// ends). Every non-vertical order of the locations by y - a*x is realized.
inline std::vector<Rational> generic_slopes(std::span<const Point2> pts) {
    std::vector<Rational> critical;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (pts[i].x != pts[j].x) critical.emplace_back(BigInt(pts[j].y - pts[i].y), BigInt(pts[j].x - pts[i].x));
    std::sort(critical.begin(), critical.end());
    critical.erase(std::unique(critical.begin(), critical.end()), critical.end());
    if (critical.empty()) return {Rational(0)};
    std::vector<Rational> out;
    out.push_back(critical.front() - 1);
    for (std::size_t i = 0; i + 1 < critical.size(); ++i) out.push_back((critical[i] + critical[i + 1]) / 2);
    out.push_back(critical.back() + 1);
    return out;
}

/// Location indices ordered by y - a*x (ties impossible for generic a).
inline std::vector<std::size_t> order_by_offset(std::span<const Point2> pts, const Rational& slope) {
    const Int128 p = static_cast<Int128>(numerator_of(slope).convert_to<long long>());
    const Int128 q = static_cast<Int128>(denominator_of(slope).convert_to<long long>());
    std::vector<std::pair<Int128, std::size_t>> keys;
    keys.reserve(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) keys.emplace_back(q * pts[k].y - p * pts[k].x, k);
    std::sort(keys.begin(), keys.end());
    std::vector<std::size_t> out;
    out.reserve(keys.size());
    for (const auto& kv : keys) out.push_back(kv.second);
    return out;
}

inline bool slope_fits_int128(const Rational& s) {
    using boost::multiprecision::abs;
    return abs(numerator_of(s)) < (BigInt(1) << 62) && denominator_of(s) < (BigInt(1) << 62);
}

/// As order_by_offset, in exact big arithmetic when the slope is large.
inline std::vector<std::size_t> order_by_offset_exact(std::span<const Point2> pts, const Rational& slope) {
    if (slope_fits_int128(slope)) return order_by_offset(pts, slope);
    std::vector<std::pair<Rational, std::size_t>> keys;
    for (std::size_t k = 0; k < pts.size(); ++k) keys.emplace_back(Rational(pts[k].y) - slope * pts[k].x, k);
    std::sort(keys.begin(), keys.end());
    std::vector<std::size_t> out;
    for (const auto& kv : keys) out.push_back(kv.second);
    return out;
}

template <typename Emit>
void enumerate_slabs(const Locations& loc, Emit&& emit) {
    RowBits acc(loc.words);
    emit(acc);
    for (const Rational& slope : generic_slopes(loc.points)) {
        const std::vector<std::size_t> order = order_by_offset_exact(loc.points, slope);
        for (std::size_t first = 0; first < order.size(); ++first) {
            acc.clear();
            for (std::size_t last = first; last < order.size(); ++last) {
                acc |= loc.bits[order[last]];
                emit(acc);
            }
        }
    }
}

template <typename Emit>
void enumerate_vparallelograms(const Locations& loc, Emit&& emit) {
    RowBits empty(loc.words);
    emit(empty);
    std::vector<std::int64_t> xs;
    for (const Point2& p : loc.points) xs.push_back(p.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<std::size_t> which;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i; j < xs.size(); ++j) {
            which.clear();
            for (std::size_t k = 0; k < loc.points.size(); ++k)
                if (loc.points[k].x >= xs[i] && loc.points[k].x <= xs[j]) which.push_back(k);
            enumerate_slabs(subset_of(loc, which), emit);
        }
    }
}

template <typename Emit>
void enumerate_disks(const Locations& loc, Emit&& emit) {
    enumerate_halfplanes(loc, emit);
    for (const RowBits& b : loc.bits) emit(b);
    const std::size_t n = loc.points.size();
    RowBits inside(loc.words);
    std::vector<std::size_t> on;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                Point2 a = loc.points[i], b = loc.points[j], c = loc.points[k];
                const Orientation o = orient(a, b, c);
                if (o == Orientation::Collinear) continue;
                if (o == Orientation::CW) std::swap(b, c);
                inside.clear();
                on.clear();
                for (std::size_t d = 0; d < n; ++d) {
                    const int s = (d == i || d == j || d == k) ? 0 : in_circle_filtered(a, b, c, loc.points[d]);
                    if (s > 0)
                        inside |= loc.bits[d];
                    else if (s == 0)
                        on.push_back(d);
                }
                RowBits combined(loc.words);
                enumerate_halfplanes(subset_of(loc, on), [&](const RowBits& part) {
                    combined = inside;
                    combined |= part;
                    emit(combined);
                });
            }
        }
    }
}

}  // namespace oracle_detail

inline void check_cap(const RangeFamily& family, std::size_t n) {
    if (n > family.cap)
        throw CapExceeded(std::string(family.name()) + " oracle cap exceeded: " + std::to_string(n) + " > " +
                          std::to_string(family.cap));
}

/// All distinct induced subsets of ys under the family, deduplicated and in
/// canonical (lexicographic bitset) order. Duplicate points are distinct
/// elements.
inline SubsetTable subsystem_oracle(const RangeFamily& family, std::span<const Point2> ys) {
    check_cap(family, ys.size());
    SubsetTable table(ys.size());
    const std::size_t words = table.words();
    const oracle_detail::Locations loc = oracle_detail::group_locations(ys, words);
    auto emit = [&](const RowBits& b) { table.insert(b.span()); };
    switch (family.kind) {
        case FamilyKind::Halfplane: oracle_detail::enumerate_halfplanes(loc, emit); break;
        case FamilyKind::Quadrant: oracle_detail::enumerate_quadrants(loc, emit); break;
        case FamilyKind::Disk: oracle_detail::enumerate_disks(loc, emit); break;
        case FamilyKind::Slab: oracle_detail::enumerate_slabs(loc, emit); break;
        case FamilyKind::VParallelogram: oracle_detail::enumerate_vparallelograms(loc, emit); break;
        case FamilyKind::Wedge:
        case FamilyKind::DoubleWedge: {
            SubsetTable halfplanes(ys.size());
            oracle_detail::enumerate_halfplanes(loc, [&](const RowBits& b) { halfplanes.insert(b.span()); });
            std::vector<std::uint64_t> row(words);
            const bool intersect = family.kind == FamilyKind::Wedge;
            for (std::size_t i = 0; i < halfplanes.size(); ++i) {
                auto ri = halfplanes.row(i);
                for (std::size_t j = i; j < halfplanes.size(); ++j) {
                    auto rj = halfplanes.row(j);
                    for (std::size_t w = 0; w < words; ++w) row[w] = intersect ? (ri[w] & rj[w]) : (ri[w] ^ rj[w]);
                    table.insert(row);
                }
            }
            break;
        }
    }
    table.canonicalize();
    return table;
}

// ---------------------------------------------------------------------------
// Canonical witness descriptors.

namespace canonical_detail {

inline Rational abs_r(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline std::vector<Point2> distinct(std::span<const Point2> ys) {
    std::vector<Point2> pts(ys.begin(), ys.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

/// Halfplanes far enough out to contain nothing or everything.
inline HalfplaneRange empty_halfplane(std::span<const Point2> pts) {
    std::int64_t mx = 0;
    for (const Point2& p : pts) mx = std::max(mx, p.x);
    return {1, 0, Rational(mx) + 1};
}

inline HalfplaneRange full_halfplane(std::span<const Point2> pts) {
    std::int64_t mn = 0;
    for (const Point2& p : pts) mn = std::min(mn, p.x);
    return {1, 0, Rational(mn)};
}

inline std::vector<HalfplaneRange> halfplanes(std::span<const Point2> ys) {
    const std::vector<Point2> pts = distinct(ys);
    std::vector<HalfplaneRange> out{empty_halfplane(pts), full_halfplane(pts)};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (i == j) continue;
            // Direction u from pts[i] to pts[j]; left normal n; n.p >= t keeps the left side and the line.
            const Rational ux = pts[j].x - pts[i].x, uy = pts[j].y - pts[i].y;
            const Rational nx = -uy, ny = ux;
            const Rational t = nx * pts[i].x + ny * pts[i].y;
            std::vector<Rational> along;
            for (const Point2& p : pts)
                if (nx * p.x + ny * p.y == t) along.push_back(ux * p.x + uy * p.y);
            std::sort(along.begin(), along.end());
            std::vector<Rational> cuts{along.front() - Rational(1, 2)};
            for (const Rational& s : along) cuts.push_back(s + Rational(1, 2));
            for (const Rational& c : cuts) {
                Rational spread = 0;
                for (const Point2& p : pts) spread = std::max(spread, abs_r(ux * p.x + uy * p.y - c));
                const Rational eta = Rational(1) / (2 * (spread + 1));
                for (int sigma : {1, -1}) {
                    // on-line points enter iff sigma*(u.p - c) <= 0
                    out.push_back({nx - eta * sigma * ux, ny - eta * sigma * uy, t - eta * sigma * c});
                }
            }
        }
    }
    return out;
}

/// A disk realizing {p : h(p) >= 0} on the given points.
inline DiskRange disk_from_halfplane(const HalfplaneRange& h, std::span<const Point2> pts) {
    Rational gap = -1;
    for (const Point2& p : pts) {
        Rational g = h.a * p.x + h.b * p.y - h.t;
        if (g < 0 && (gap < 0 || -g < gap)) gap = -g;
    }
    HalfplaneRange shifted = h;
    if (gap > 0) shifted.t = h.t - gap / 2;
    else gap = 2;
    RationalPoint p0 = shifted.a != 0 ? RationalPoint(shifted.t / shifted.a, Rational(0))
                                      : RationalPoint(Rational(0), shifted.t / shifted.b);
    Rational reach = 0;
    for (const Point2& p : pts) {
        Rational dx = p.x - p0.x, dy = p.y - p0.y;
        reach = std::max(reach, Rational(dx * dx + dy * dy));
    }
    const Rational lambda = reach * 2 / gap + 1;
    const Rational cx = p0.x + lambda * shifted.a, cy = p0.y + lambda * shifted.b;
    return {cx, cy, lambda * lambda * (shifted.a * shifted.a + shifted.b * shifted.b)};
}

inline std::vector<DiskRange> disks(std::span<const Point2> ys) {
    const std::vector<Point2> pts = distinct(ys);
    std::vector<DiskRange> out;
    for (const HalfplaneRange& h : halfplanes(pts)) out.push_back(disk_from_halfplane(h, pts));
    for (const Point2& p : pts) out.push_back({Rational(p.x), Rational(p.y), Rational(0)});
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                const Point2 &a = pts[i], &b = pts[j], &c = pts[k];
                if (cross(a, b, c) == 0) continue;
                // Circumcenter of a, b, c.
                const Rational ax = a.x, ay = a.y, bx = b.x, by = b.y, cx = c.x, cy = c.y;
                const Rational dd = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
                const Rational a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
                const Rational ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / dd;
                const Rational uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / dd;
                const Rational r2 = (ax - ux) * (ax - ux) + (ay - uy) * (ay - uy);
                // Lifted plane z <= alpha x + beta y + gamma.
                const Rational alpha = 2 * ux, beta = 2 * uy, gamma = r2 - ux * ux - uy * uy;
                std::vector<Point2> on;
                Rational min_margin = -1;
                for (const Point2& p : pts) {
                    Rational margin = alpha * p.x + beta * p.y + gamma - Rational(p.x) * p.x - Rational(p.y) * p.y;
                    if (margin == 0)
                        on.push_back(p);
                    else if (min_margin < 0 || abs_r(margin) < min_margin)
                        min_margin = abs_r(margin);
                }
                if (min_margin < 0) min_margin = 1;
                for (const HalfplaneRange& h : halfplanes(on)) {
                    Rational spread = 0;
                    for (const Point2& p : pts) spread = std::max(spread, abs_r(h.a * p.x + h.b * p.y - h.t));
                    const Rational eta = min_margin / (2 * (spread + 1));
                    const Rational al = alpha + eta * h.a, be = beta + eta * h.b, ga = gamma - eta * h.t;
                    const Rational ccx = al / 2, ccy = be / 2;
                    const Rational rr = ga + ccx * ccx + ccy * ccy;
                    if (rr < 0) continue;
                    out.push_back({ccx, ccy, rr});
                }
            }
        }
    }
    return out;
}

inline std::vector<SlabRange> slabs(std::span<const Point2> ys) {
    const std::vector<Point2> pts = distinct(ys);
    std::int64_t min_y = 0;
    for (const Point2& p : pts) min_y = std::min(min_y, p.y);
    std::vector<SlabRange> out{{Rational(0), Rational(min_y) - 1, Rational(min_y) - 1}};
    for (const Rational& a : oracle_detail::generic_slopes(pts)) {
        std::vector<Rational> offsets;
        for (std::size_t k : oracle_detail::order_by_offset_exact(pts, a)) offsets.push_back(Rational(pts[k].y) - a * pts[k].x);
        for (std::size_t i = 0; i < offsets.size(); ++i)
            for (std::size_t j = i; j < offsets.size(); ++j) out.push_back({a, offsets[i], offsets[j]});
    }
    return out;
}

}  // namespace canonical_detail

/// Finite witness set of descriptors whose induced subsets cover every set
/// the subsystem oracle lists for ys.
inline std::vector<RangeDescriptor> canonical_ranges(const RangeFamily& family, std::span<const Point2> ys) {
    check_cap(family, ys.size());
    using namespace canonical_detail;
    std::vector<RangeDescriptor> out;
    switch (family.kind) {
        case FamilyKind::Halfplane:
            for (const auto& h : halfplanes(ys)) out.emplace_back(h);
            break;
        case FamilyKind::Quadrant: {
            std::vector<Point2> pts = distinct(ys);
            std::vector<std::int64_t> xs, yv;
            std::int64_t mx = 0, my = 0;
            for (const Point2& p : pts) {
                xs.push_back(p.x);
                yv.push_back(p.y);
                mx = std::max(mx, p.x);
                my = std::max(my, p.y);
            }
            xs.push_back(mx + 1);
            yv.push_back(my + 1);
            std::sort(xs.begin(), xs.end());
            xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
            std::sort(yv.begin(), yv.end());
            yv.erase(std::unique(yv.begin(), yv.end()), yv.end());
            for (std::int64_t x : xs)
                for (std::int64_t y : yv) out.emplace_back(QuadrantRange{Rational(x), Rational(y)});
            break;
        }
        case FamilyKind::Wedge:
        case FamilyKind::DoubleWedge: {
            // One representative halfplane per distinct induced subset keeps the pair product small.
            std::vector<HalfplaneRange> reps;
            SubsetTable seen(ys.size());
            for (const HalfplaneRange& h : halfplanes(ys)) {
                std::vector<std::size_t> members;
                for (std::size_t i = 0; i < ys.size(); ++i)
                    if (contains(RangeDescriptor(h), ys[i])) members.push_back(i);
                if (seen.insert_members(members)) reps.push_back(h);
            }
            for (std::size_t i = 0; i < reps.size(); ++i)
                for (std::size_t j = i; j < reps.size(); ++j) {
                    if (family.kind == FamilyKind::Wedge)
                        out.emplace_back(WedgeRange{reps[i], reps[j]});
                    else
                        out.emplace_back(DoubleWedgeRange{reps[i], reps[j]});
                }
            break;
        }
        case FamilyKind::Disk:
            for (const auto& d : disks(ys)) out.emplace_back(d);
            break;
        case FamilyKind::Slab:
            for (const auto& s : slabs(ys)) out.emplace_back(s);
            break;
        case FamilyKind::VParallelogram: {
            const std::vector<Point2> pts = distinct(ys);
            std::vector<std::int64_t> xs;
            for (const Point2& p : pts) xs.push_back(p.x);
            std::sort(xs.begin(), xs.end());
            xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
            const Rational outside = xs.empty() ? Rational(0) : Rational(xs.front()) - 1;
            out.emplace_back(VParallelogramRange{outside, outside, SlabRange{Rational(0), Rational(0), Rational(0)}});
            for (std::size_t i = 0; i < xs.size(); ++i) {
                for (std::size_t j = i; j < xs.size(); ++j) {
                    std::vector<Point2> window;
                    for (const Point2& p : pts)
                        if (p.x >= xs[i] && p.x <= xs[j]) window.push_back(p);
                    for (const SlabRange& s : slabs(window))
                        out.emplace_back(VParallelogramRange{Rational(xs[i]), Rational(xs[j]), s});
                }
            }
            break;
        }
    }
    return out;
}

/// Induced subsets of the given descriptors on ys, deduplicated.
inline SubsetTable induced_subsets(std::span<const RangeDescriptor> ranges, std::span<const Point2> ys) {
    SubsetTable table(ys.size());
    std::vector<std::size_t> members;
    for (const RangeDescriptor& r : ranges) {
        members.clear();
        for (std::size_t i = 0; i < ys.size(); ++i)
            if (contains(r, ys[i])) members.push_back(i);
        table.insert_members(members);
    }
    table.canonicalize();
    return table;
}

}  // namespace epsstream
