#pragma once

// Deterministic eps-approximations by iterated halving. Each halving colors
// the sample with a greedy hyperbolic-cosine rule over the oracle ranges,
// keeps one color class, and measures the error it caused exactly.

#include "epsstream/range_families.hpp"
#include "epsstream/subset_table.hpp"
#include "epsstream/subsystem_oracle.hpp"
#include "epsstream/weighted_sample.hpp"

#include <bit>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace epsstream {

/// An approximation failed its exact check. Never recoverable.
struct CertificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Coloring {
    std::vector<int> signs;
};

/// Potential guarantee sqrt(2 * W2 * ln(2 * |ranges|)) of the greedy coloring.
inline long double coloring_bound(long double w2, std::size_t ranges) {
    return std::sqrt(2.0L * w2 * std::log(2.0L * static_cast<long double>(std::max<std::size_t>(ranges, 1))));
}

namespace sampler_detail {

inline Int128 to_int128(const BigInt& v) {
    const BigInt mag = boost::multiprecision::abs(v);
    const BigInt mask = (BigInt(1) << 64) - 1;
    const auto lo = static_cast<unsigned __int128>(BigInt(mag & mask).convert_to<std::uint64_t>());
    const auto hi = static_cast<unsigned __int128>(BigInt(mag >> 64).convert_to<std::uint64_t>());
    const auto m = static_cast<Int128>((hi << 64) | lo);
    return v < 0 ? -m : m;
}

template <typename F>
void for_each_member(std::span<const std::uint64_t> row, F&& f) {
    for (std::size_t w = 0; w < row.size(); ++w) {
        std::uint64_t word = row[w];
        while (word != 0) {
            f(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
            word &= word - 1;
        }
    }
}

}  // namespace sampler_detail

/// max over rows R of |sum_{i in R} deltas[i]|, exactly.
inline Rational max_row_discrepancy(const SubsetTable& table, std::span<const Rational> deltas) {
    using sampler_detail::for_each_member;
    BigInt den = 1;
    for (const Rational& d : deltas) den = boost::multiprecision::lcm(den, denominator_of(d));
    std::vector<BigInt> nums;
    nums.reserve(deltas.size());
    BigInt reach = 0;
    for (const Rational& d : deltas) {
        nums.push_back(numerator_of(d) * (den / denominator_of(d)));
        reach += boost::multiprecision::abs(nums.back());
    }
    if (reach < (BigInt(1) << 120)) {
        std::vector<Int128> small;
        small.reserve(nums.size());
        for (const BigInt& v : nums) small.push_back(sampler_detail::to_int128(v));
        Int128 best = 0;
        for (std::size_t r = 0; r < table.size(); ++r) {
            Int128 sum = 0;
            for_each_member(table.row(r), [&](std::size_t i) { sum += small[i]; });
            if (sum < 0) sum = -sum;
            best = std::max(best, sum);
        }
        const BigInt big = (BigInt(static_cast<std::int64_t>(best >> 62)) << 62) +
                           BigInt(static_cast<std::uint64_t>(best & ((Int128(1) << 62) - 1)));
        return Rational(big, den);
    }
    // Floating filter, then exact sums for rows that can still be the maximum.
    std::vector<long double> approx;
    long double scale_sum = 0;
    for (const Rational& d : deltas) {
        approx.push_back(to_long_double(d));
        scale_sum += std::fabs(approx.back());
    }
    const long double margin = scale_sum * static_cast<long double>(deltas.size() + 4) * 0x1p-60L;
    std::vector<long double> sums(table.size());
    long double top = 0;
    for (std::size_t r = 0; r < table.size(); ++r) {
        long double s = 0;
        for_each_member(table.row(r), [&](std::size_t i) { s += approx[i]; });
        sums[r] = std::fabs(s);
        top = std::max(top, sums[r]);
    }
    BigInt best = 0;
    for (std::size_t r = 0; r < table.size(); ++r) {
        if (sums[r] < top - 2 * margin) continue;
        BigInt s = 0;
        for_each_member(table.row(r), [&](std::size_t i) { s += nums[i]; });
        best = std::max(best, BigInt(boost::multiprecision::abs(s)));
    }
    return Rational(best, den);
}

/// Greedy signs minimizing sum_R cosh(lambda * D_R) point by point, in the
/// sample's order. A sign is flipped when it would push the running balance
/// past the largest weight.
inline Coloring low_discrepancy_coloring(const WeightedSample& y, const SubsetTable& ranges) {
    const std::size_t m = y.size();
    if (m < 2) throw std::invalid_argument("coloring needs at least two points");
    if (ranges.universe() != m) throw std::invalid_argument("ranges do not match the sample");

    const std::size_t rows = ranges.size();
    const std::size_t row_words = (rows + 63) / 64;
    std::vector<std::uint64_t> columns(m * row_words, 0);
    for (std::size_t r = 0; r < rows; ++r)
        sampler_detail::for_each_member(ranges.row(r),
                                        [&](std::size_t i) { columns[i * row_words + r / 64] |= std::uint64_t{1} << (r % 64); });

    long double w2 = 0;
    std::vector<long double> g(m);
    for (std::size_t i = 0; i < m; ++i) {
        g[i] = to_long_double(y.weights[i]);
        w2 += g[i] * g[i];
    }
    const long double lambda = std::sqrt(2.0L * std::log(2.0L * static_cast<long double>(std::max<std::size_t>(rows, 1))) / w2);
    std::vector<double> growth(rows, 1.0);  // exp(lambda * D_R)

    const Rational cap = y.max_weight();
    Rational balance = 0;
    Coloring out;
    out.signs.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::span<const std::uint64_t> col(columns.data() + i * row_words, row_words);
        long double pull = 0;
        sampler_detail::for_each_member(col, [&](std::size_t r) {
            const long double e = growth[r];
            pull += e - 1.0L / e;
        });
        int s = pull > 0 ? -1 : 1;
        Rational next = s > 0 ? Rational(balance + y.weights[i]) : Rational(balance - y.weights[i]);
        if (next > cap || next < -cap) {
            s = -s;
            next = s > 0 ? Rational(balance + y.weights[i]) : Rational(balance - y.weights[i]);
        }
        balance = next;
        out.signs[i] = s;
        const double step = static_cast<double>(std::exp(lambda * g[i] * s));
        sampler_detail::for_each_member(col, [&](std::size_t r) { growth[r] *= step; });
    }
    return out;
}

struct HalveResult {
    WeightedSample sample;
    Rational incurred_error;
};

/// Keeps the smaller sign class (ties: +1) scaled to the full total weight and
/// measures its worst relative error over the given ranges of s.
inline HalveResult halve_with(const WeightedSample& s, const SubsetTable& ranges) {
    const Coloring c = low_discrepancy_coloring(s, ranges);
    std::size_t plus = 0;
    for (int v : c.signs) plus += v > 0;
    const int keep = plus <= s.size() - plus ? 1 : -1;
    Rational kept_weight = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (c.signs[i] == keep) kept_weight += s.weights[i];
    const Rational factor = s.total_weight / kept_weight;

    HalveResult out;
    out.sample.total_weight = s.total_weight;
    std::vector<Rational> deltas(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (c.signs[i] == keep) {
            out.sample.points.push_back(s.points[i]);
            out.sample.weights.push_back(s.weights[i] * factor);
            deltas[i] = s.weights[i] * (factor - 1);
        } else {
            deltas[i] = -s.weights[i];
        }
    }
    out.incurred_error = max_row_discrepancy(ranges, deltas) / s.total_weight;
    out.sample.eps_bound = s.eps_bound + out.incurred_error;
    return out;
}

inline HalveResult halve(const WeightedSample& s, const RangeFamily& family) {
    if (s.size() < 2) throw std::invalid_argument("halve needs at least two points");
    WeightedSample canon = s;
    canon.canonicalize();
    if (canon.size() < 2) {
        // Only duplicates: merging them is the exact halving.
        canon.eps_bound = s.eps_bound;
        return {canon, Rational(0)};
    }
    return halve_with(canon, subsystem_oracle(family, canon.points));
}

/// Rigorous lower bound on the error of any halving of canonical s. The
/// lexicographically largest point is a range by itself in every family,
/// and the balance rule keeps the kept weight within (T +- maxw) / 2.
inline Rational halving_lower_bound(const WeightedSample& s) {
    if (s.size() < 2) return 0;
    const Rational t = s.total_weight;
    const Rational m = s.max_weight();
    if (t <= m) return 0;
    return s.weights.back() * (t - m) / ((t + m) * t);
}

/// Error of candidate against ground as a fraction of ground's total weight,
/// over an oracle table for ground's canonical support. Candidate support
/// must lie inside ground's.
inline Rational relative_error_on(const WeightedSample& ground, const SubsetTable& table, const WeightedSample& candidate) {
    std::vector<Rational> deltas(ground.size());
    for (std::size_t i = 0; i < ground.size(); ++i) deltas[i] = -ground.weights[i];
    std::size_t g = 0;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        while (g < ground.size() && ground.points[g] < candidate.points[i]) ++g;
        if (g == ground.size() || ground.points[g] != candidate.points[i])
            throw std::logic_error("candidate support is not inside ground support");
        deltas[g] += candidate.weights[i];
    }
    return max_row_discrepancy(table, deltas) / ground.total_weight;
}

/// Weighted error of candidate against ground (max over all induced ranges of
/// the union of supports), relative to ground's total weight.
inline Rational approximation_error(const WeightedSample& ground, const WeightedSample& candidate,
                                    const RangeFamily& family) {
    WeightedSample g = ground, c = candidate;
    g.canonicalize();
    c.canonicalize();
    WeightedSample u;
    for (const Point2& p : g.points) u.points.push_back(p);
    for (const Point2& p : c.points) u.points.push_back(p);
    std::sort(u.points.begin(), u.points.end());
    u.points.erase(std::unique(u.points.begin(), u.points.end()), u.points.end());
    const SubsetTable table = subsystem_oracle(family, u.points);
    std::vector<Rational> deltas(u.size());
    auto accumulate = [&](const WeightedSample& s, int sign) {
        std::size_t k = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            while (u.points[k] != s.points[i]) ++k;
            deltas[k] += sign > 0 ? s.weights[i] : Rational(-s.weights[i]);
        }
    };
    accumulate(c, 1);
    accumulate(g, -1);
    if (g.total_weight == 0) return max_row_discrepancy(table, deltas) == 0 ? Rational(0) : Rational(1);
    return max_row_discrepancy(table, deltas) / g.total_weight;
}

/// True iff |candidate(R) - ground(R)| <= eps * ground.total_weight for
/// every range R, checked exactly.
inline bool verify_approximation(const WeightedSample& ground, const WeightedSample& candidate, const RangeFamily& family,
                                 const Rational& eps) {
    return approximation_error(ground, candidate, family) <= eps;
}

inline void check_eps(const Rational& eps) {
    if (eps <= 0 || eps > 1) throw std::invalid_argument("eps must lie in (0, 1]");
}

/// Size target C * eps^-2 * lg(1/eps + 2) used to audit outputs.
inline constexpr double kSizeConstant = 4.0;

inline double size_bound(const Rational& eps) {
    const double e = to_double(eps);
    return kSizeConstant / (e * e) * std::log2(1.0 / e + 2.0);
}

/// Weighted eps-approximation of s: halves until the next halving would push
/// the summed measured error past eps. Output eps_bound = s.eps_bound + the
/// exactly measured error against s.
inline WeightedSample weighted_eps_approx(const WeightedSample& s, const RangeFamily& family, const Rational& eps) {
    check_eps(eps);
    WeightedSample ground = s;
    ground.canonicalize();
    if (ground.size() < 2) {
        ground.eps_bound = s.eps_bound;
        return ground;
    }
    if (eps == 1) {
        // Every weighted range fraction lies in [0, 1].
        WeightedSample one;
        one.points = {ground.points.front()};
        one.weights = {ground.total_weight};
        one.total_weight = ground.total_weight;
        one.eps_bound = s.eps_bound + 1;
        return one;
    }
    std::optional<SubsetTable> ground_table;
    WeightedSample cur = ground;
    Rational spent = 0;
    while (cur.size() >= 2) {
        if (spent + halving_lower_bound(cur) > eps) break;
        SubsetTable table = subsystem_oracle(family, cur.points);
        HalveResult h = halve_with(cur, table);
        if (!ground_table) ground_table = std::move(table);
        if (spent + h.incurred_error > eps) break;
        spent += h.incurred_error;
        cur = std::move(h.sample);
    }
    if (cur.size() == ground.size()) {
        ground.eps_bound = s.eps_bound;
        return ground;
    }
    const Rational measured = relative_error_on(ground, *ground_table, cur);
    if (measured > eps || measured > spent) throw CertificationError("halving chain failed its exact check");
    cur.eps_bound = s.eps_bound + measured;
    cur.check_invariants();
    return cur;
}

/// eps-approximation of the point multiset X with unit weights.
inline WeightedSample static_eps_approx(std::span<const Point2> xs, const RangeFamily& family, const Rational& eps) {
    check_eps(eps);
    if (xs.empty()) throw std::invalid_argument("empty input");
    return weighted_eps_approx(WeightedSample::from_points(xs), family, eps);
}

}  // namespace epsstream
