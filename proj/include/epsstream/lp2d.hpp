#pragma once

// Exact two-variable linear feasibility: lexicographically smallest (x, y)
// in a box intersected with closed halfplanes a*x + b*y >= c.
// Seidel's incremental method with a fixed, input-independent visiting order.

#include "epsstream/geometry.hpp"
#include "epsstream/numeric.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace epsstream {

struct LinearConstraint {
    Rational a, b, c;  // a*x + b*y >= c

    bool holds(const RationalPoint& p) const { return a * p.x + b * p.y >= c; }
};

struct Box {
    Rational xlo, xhi, ylo, yhi;
};

namespace lp_detail {

inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Lexicographic minimum on the line a*x + b*y = c subject to earlier
/// constraints and the box.
inline std::optional<RationalPoint> solve_on_line(const LinearConstraint& line, std::span<const LinearConstraint* const> earlier,
                                                  const Box& box) {
    const bool vertical = line.b == 0;
    // Parametrize by t = x (non-vertical) or t = y (vertical).
    std::optional<Rational> lo, hi;
    auto tighten_lo = [&](const Rational& v) {
        if (!lo || v > *lo) lo = v;
    };
    auto tighten_hi = [&](const Rational& v) {
        if (!hi || v < *hi) hi = v;
    };
    // Constraint alpha * t >= beta on the line.
    auto apply = [&](const Rational& alpha, const Rational& beta) -> bool {
        if (alpha > 0)
            tighten_lo(beta / alpha);
        else if (alpha < 0)
            tighten_hi(beta / alpha);
        else if (beta > 0)
            return false;
        return true;
    };
    if (vertical) {
        const Rational x = line.c / line.a;
        if (x < box.xlo || x > box.xhi) return std::nullopt;
        tighten_lo(box.ylo);
        tighten_hi(box.yhi);
        for (const LinearConstraint* h : earlier)
            if (!apply(h->b, h->c - h->a * x)) return std::nullopt;
        if (*lo > *hi) return std::nullopt;
        return RationalPoint(x, *lo);
    }
    // y = (c - a x) / b
    const Rational slope = -line.a / line.b, offset = line.c / line.b;
    tighten_lo(box.xlo);
    tighten_hi(box.xhi);
    // ylo <= slope*x + offset <= yhi
    if (!apply(slope, box.ylo - offset) || !apply(-slope, offset - box.yhi)) return std::nullopt;
    for (const LinearConstraint* h : earlier)
        if (!apply(h->a + h->b * slope, h->c - h->b * offset)) return std::nullopt;
    if (*lo > *hi) return std::nullopt;
    return RationalPoint(*lo, slope * *lo + offset);
}

}  // namespace lp_detail

/// Lexicographically smallest point of box ∩ constraints, or nothing when
/// the intersection is empty. Constraints with a = b = 0 must have c <= 0.
inline std::optional<RationalPoint> lexmin_feasible(std::span<const LinearConstraint> constraints, const Box& box) {
    std::vector<const LinearConstraint*> order;
    order.reserve(constraints.size());
    for (const LinearConstraint& h : constraints) {
        if (h.a == 0 && h.b == 0) {
            if (h.c > 0) return std::nullopt;
            continue;
        }
        order.push_back(&h);
    }
    std::vector<std::uint64_t> keys(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) keys[i] = lp_detail::mix(i);
    std::vector<std::size_t> perm(order.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    std::vector<const LinearConstraint*> visit;
    visit.reserve(order.size());
    for (std::size_t i : perm) visit.push_back(order[i]);

    if (box.xlo > box.xhi || box.ylo > box.yhi) return std::nullopt;
    RationalPoint v(box.xlo, box.ylo);
    for (std::size_t i = 0; i < visit.size(); ++i) {
        if (visit[i]->holds(v)) continue;
        auto next = lp_detail::solve_on_line(*visit[i], std::span(visit.data(), i), box);
        if (!next) return std::nullopt;
        v = std::move(*next);
    }
    return v;
}

}  // namespace epsstream
