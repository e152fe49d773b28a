#pragma once

#include "epsstream/geometry.hpp"
#include "epsstream/numeric.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace epsstream {

enum class FamilyKind { Halfplane, Quadrant, Wedge, DoubleWedge, Disk, Slab, VParallelogram };

inline constexpr std::array<FamilyKind, 7> kAllFamilies = {
    FamilyKind::Halfplane, FamilyKind::Quadrant, FamilyKind::Wedge,         FamilyKind::DoubleWedge,
    FamilyKind::Disk,      FamilyKind::Slab,     FamilyKind::VParallelogram};

struct FamilyMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CapExceeded : std::length_error {
    using std::length_error::length_error;
};

inline std::string_view family_name(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::Halfplane: return "halfplane";
        case FamilyKind::Quadrant: return "quadrant";
        case FamilyKind::Wedge: return "wedge";
        case FamilyKind::DoubleWedge: return "dwedge";
        case FamilyKind::Disk: return "disk";
        case FamilyKind::Slab: return "slab";
        case FamilyKind::VParallelogram: return "vpar";
    }
    return "?";
}

inline FamilyKind parse_family(std::string_view name) {
    for (FamilyKind k : kAllFamilies)
        if (family_name(k) == name) return k;
    if (name == "doublewedge") return FamilyKind::DoubleWedge;
    if (name == "vparallelogram") return FamilyKind::VParallelogram;
    throw ParseError("unknown range family '" + std::string(name) + "'");
}

/// Growth exponent of the number of induced subsets on m points.
inline constexpr int oracle_dimension(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::Halfplane:
        case FamilyKind::Quadrant: return 2;
        case FamilyKind::Disk:
        case FamilyKind::Slab: return 3;
        case FamilyKind::Wedge:
        case FamilyKind::DoubleWedge: return 4;
        case FamilyKind::VParallelogram: return 5;
    }
    return 0;
}

/// Largest ground set the subsystem oracle accepts by default. The bound is
/// what the enumeration can list (and store as bitsets) in desk-scale time.
inline constexpr std::size_t default_oracle_cap(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::Halfplane:
        case FamilyKind::Quadrant: return 512;
        case FamilyKind::Disk:
        case FamilyKind::Slab: return 96;
        case FamilyKind::Wedge: return 48;
        case FamilyKind::DoubleWedge: return 64;
        case FamilyKind::VParallelogram: return 24;
    }
    return 0;
}

struct RangeFamily {
    FamilyKind kind = FamilyKind::Halfplane;
    std::size_t cap = default_oracle_cap(FamilyKind::Halfplane);

    RangeFamily() = default;
    RangeFamily(FamilyKind k) : kind(k), cap(default_oracle_cap(k)) {}  // NOLINT(google-explicit-constructor)
    RangeFamily(FamilyKind k, std::size_t c) : kind(k), cap(c) {}

    int dimension() const { return oracle_dimension(kind); }
    std::string_view name() const { return family_name(kind); }

    friend bool operator==(const RangeFamily&, const RangeFamily&) = default;
};

// Range descriptors live in scaled lattice coordinates. All regions are closed.

/// a*x + b*y >= t
struct HalfplaneRange {
    Rational a, b, t;
};

/// x >= p && y >= q
struct QuadrantRange {
    Rational p, q;
};

struct WedgeRange {
    HalfplaneRange first, second;
};

/// Symmetric difference of two halfplanes.
struct DoubleWedgeRange {
    HalfplaneRange first, second;
};

/// (x-cx)^2 + (y-cy)^2 <= r2
struct DiskRange {
    Rational cx, cy, r2;
};

/// a*x + b1 <= y <= a*x + b2
struct SlabRange {
    Rational a, b1, b2;
};

/// x1 <= x <= x2 intersected with a slab.
struct VParallelogramRange {
    Rational x1, x2;
    SlabRange slab;
};

using RangeDescriptor = std::variant<HalfplaneRange, QuadrantRange, WedgeRange, DoubleWedgeRange, DiskRange,
                                     SlabRange, VParallelogramRange>;

inline FamilyKind kind_of(const RangeDescriptor& r) { return static_cast<FamilyKind>(r.index()); }

inline void validate(const RangeDescriptor& r) {
    auto check_halfplane = [](const HalfplaneRange& h) {
        if (h.a == 0 && h.b == 0) throw std::invalid_argument("halfplane needs a nonzero normal");
    };
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, HalfplaneRange>) {
                check_halfplane(d);
            } else if constexpr (std::is_same_v<T, WedgeRange> || std::is_same_v<T, DoubleWedgeRange>) {
                check_halfplane(d.first);
                check_halfplane(d.second);
            } else if constexpr (std::is_same_v<T, DiskRange>) {
                if (d.r2 < 0) throw std::invalid_argument("disk needs r2 >= 0");
            } else if constexpr (std::is_same_v<T, SlabRange>) {
                if (d.b1 > d.b2) throw std::invalid_argument("slab needs b1 <= b2");
            } else if constexpr (std::is_same_v<T, VParallelogramRange>) {
                if (d.x1 > d.x2) throw std::invalid_argument("vpar needs x1 <= x2");
                if (d.slab.b1 > d.slab.b2) throw std::invalid_argument("slab needs b1 <= b2");
            }
        },
        r);
}

namespace detail {

inline bool in_halfplane(const HalfplaneRange& h, const Point2& p) { return h.a * p.x + h.b * p.y >= h.t; }

inline bool in_slab(const SlabRange& s, const Point2& p) {
    Rational base = s.a * p.x;
    return base + s.b1 <= p.y && Rational(p.y) <= base + s.b2;
}

}  // namespace detail

/// Closed-region membership. Boundary points are inside.
inline bool contains(const RangeDescriptor& r, const Point2& p) {
    return std::visit(
        [&](const auto& d) -> bool {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, HalfplaneRange>) {
                return detail::in_halfplane(d, p);
            } else if constexpr (std::is_same_v<T, QuadrantRange>) {
                return Rational(p.x) >= d.p && Rational(p.y) >= d.q;
            } else if constexpr (std::is_same_v<T, WedgeRange>) {
                return detail::in_halfplane(d.first, p) && detail::in_halfplane(d.second, p);
            } else if constexpr (std::is_same_v<T, DoubleWedgeRange>) {
                return detail::in_halfplane(d.first, p) != detail::in_halfplane(d.second, p);
            } else if constexpr (std::is_same_v<T, DiskRange>) {
                Rational dx = Rational(p.x) - d.cx;
                Rational dy = Rational(p.y) - d.cy;
                return dx * dx + dy * dy <= d.r2;
            } else if constexpr (std::is_same_v<T, SlabRange>) {
                return detail::in_slab(d, p);
            } else {
                return d.x1 <= p.x && Rational(p.x) <= d.x2 && detail::in_slab(d.slab, p);
            }
        },
        r);
}

inline bool contains(const RangeFamily& family, const RangeDescriptor& r, const Point2& p) {
    if (kind_of(r) != family.kind)
        throw FamilyMismatch("descriptor kind '" + std::string(family_name(kind_of(r))) + "' does not match family '" +
                             std::string(family.name()) + "'");
    return contains(r, p);
}

// ---------------------------------------------------------------------------
// Text format: kind:param1,param2,... in user coordinates.

namespace detail {

inline std::vector<Rational> parse_params(std::string_view text) {
    std::vector<Rational> out;
    while (true) {
        auto comma = text.find(',');
        out.push_back(parse_rational(text.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

inline HalfplaneRange scaled_halfplane(const Rational& a, const Rational& b, const Rational& t, const Rational& s) {
    return {a, b, t * s};
}

}  // namespace detail

inline RangeDescriptor parse_descriptor(std::string_view text, const CoordinateScale& scale) {
    text = detail::trim(text);
    auto colon = text.find(':');
    if (colon == std::string_view::npos) throw ParseError("descriptor needs 'kind:params'");
    const FamilyKind kind = parse_family(text.substr(0, colon));
    const std::vector<Rational> v = detail::parse_params(text.substr(colon + 1));
    const Rational s = scale.factor();
    auto expect = [&](std::size_t n) {
        if (v.size() != n)
            throw ParseError(std::string(family_name(kind)) + " descriptor takes " + std::to_string(n) + " parameters");
    };
    RangeDescriptor out;
    switch (kind) {
        case FamilyKind::Halfplane:
            expect(3);
            out = detail::scaled_halfplane(v[0], v[1], v[2], s);
            break;
        case FamilyKind::Quadrant:
            expect(2);
            out = QuadrantRange{v[0] * s, v[1] * s};
            break;
        case FamilyKind::Wedge:
            expect(6);
            out = WedgeRange{detail::scaled_halfplane(v[0], v[1], v[2], s), detail::scaled_halfplane(v[3], v[4], v[5], s)};
            break;
        case FamilyKind::DoubleWedge:
            expect(6);
            out = DoubleWedgeRange{detail::scaled_halfplane(v[0], v[1], v[2], s),
                                   detail::scaled_halfplane(v[3], v[4], v[5], s)};
            break;
        case FamilyKind::Disk:
            expect(3);
            out = DiskRange{v[0] * s, v[1] * s, v[2] * s * s};
            break;
        case FamilyKind::Slab:
            expect(3);
            out = SlabRange{v[0], v[1] * s, v[2] * s};
            break;
        case FamilyKind::VParallelogram:
            expect(5);
            out = VParallelogramRange{v[0] * s, v[1] * s, SlabRange{v[2], v[3] * s, v[4] * s}};
            break;
    }
    try {
        validate(out);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return out;
}

/// Inverse of parse_descriptor, with exact rational parameters.
inline std::string format_descriptor(const RangeDescriptor& r, const CoordinateScale& scale) {
    const Rational s = scale.factor();
    auto join = [](std::initializer_list<Rational> vals) {
        std::string out;
        for (const Rational& v : vals) {
            if (!out.empty()) out += ',';
            out += to_string(v);
        }
        return out;
    };
    std::string params = std::visit(
        [&](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, HalfplaneRange>) {
                return join({d.a, d.b, d.t / s});
            } else if constexpr (std::is_same_v<T, QuadrantRange>) {
                return join({d.p / s, d.q / s});
            } else if constexpr (std::is_same_v<T, WedgeRange> || std::is_same_v<T, DoubleWedgeRange>) {
                return join({d.first.a, d.first.b, d.first.t / s, d.second.a, d.second.b, d.second.t / s});
            } else if constexpr (std::is_same_v<T, DiskRange>) {
                return join({d.cx / s, d.cy / s, d.r2 / (s * s)});
            } else if constexpr (std::is_same_v<T, SlabRange>) {
                return join({d.a, d.b1 / s, d.b2 / s});
            } else {
                return join({d.x1 / s, d.x2 / s, d.slab.a, d.slab.b1 / s, d.slab.b2 / s});
            }
        },
        r);
    return std::string(family_name(kind_of(r))) + ":" + params;
}

}  // namespace epsstream
