// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any
// failure. Output carries no timings so two runs can be compared byte for byte.

#include "epsstream/exact_oracles.hpp"
#include "epsstream/range_queries.hpp"
#include "epsstream/robust_stats.hpp"
#include "epsstream/stream_engine.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "streams.hpp"

using namespace epsstream;
using epsstream::testing::make_stream;
using epsstream::testing::Shape;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
    if (!ok) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

Rational abs_diff(const Rational& a, const Rational& b) { return a > b ? Rational(a - b) : Rational(b - a); }

struct Stream {
    std::string name;
    std::vector<Point2> points;
};

/// 5 seeds x 4 shapes.
std::vector<Stream> stream_suite(std::size_t n) {
    std::vector<Stream> out;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
        for (Shape s : epsstream::testing::kShapes)
            out.push_back({epsstream::testing::shape_name(s) + "#" + std::to_string(seed), make_stream(s, n, seed)});
    return out;
}

EngineConfig config(FamilyKind kind, const Rational& eps) {
    EngineConfig cfg;
    cfg.family = kind;
    cfg.eps = eps;
    return cfg;
}

Snapshot exact_snapshot(const std::vector<Point2>& pts, FamilyKind kind, const Rational& eps) {
    Snapshot s;
    s.sample = WeightedSample::from_points(pts);
    s.sample.eps_bound = eps;
    s.n = pts.size();
    s.config = config(kind, eps);
    return s;
}

Snapshot streamed(const std::vector<Point2>& pts, FamilyKind kind, const Rational& eps) {
    StreamEngine e(config(kind, eps));
    for (const Point2& p : pts) e.insert(p);
    return e.snapshot();
}

// ------------------------------------------------------------------ Eq. (1) and budgets

void end_to_end_and_budgets() {
    const auto suite = stream_suite(512);
    std::size_t checks = 0, violations = 0, slot_checks = 0, slot_violations = 0;
    double worst = 0, worst_slot = 0;
    for (const Stream& s : suite)
        for (FamilyKind kind : {FamilyKind::Halfplane, FamilyKind::Quadrant})
            for (const Rational& eps : {make_rational(1, 2), make_rational(1, 4)}) {
                StreamEngine e(config(kind, eps));
                for (std::size_t i = 0; i < s.points.size(); ++i) {
                    e.insert(s.points[i]);
                    const std::size_t n = i + 1;
                    if (n == 64 || n == 256 || n == 511 || n == 512) {
                        // every slot against the exact block it summarizes
                        std::size_t end = n;
                        for (const auto& [level, slot] : e.slots()) {
                            const std::size_t len = std::size_t{1} << level;
                            const std::span<const Point2> block(s.points.data() + end - len, len);
                            end -= len;
                            const Rational err = exact::exact_discrepancy(block, slot.summary, kind);
                            const Rational limit = e.cumulative_budget(level);
                            ++slot_checks;
                            if (err > limit || err > slot.delta) ++slot_violations;
                            if (limit > 0) worst_slot = std::max(worst_slot, to_double(err / limit));
                        }
                    }
                    if (n == 64 || n == 256 || n == 512) {
                        const Snapshot snap = e.snapshot();
                        const Rational err = exact::exact_discrepancy(std::span(s.points).first(n), snap.sample, kind);
                        ++checks;
                        if (err > eps) {
                            ++violations;
                            std::cout << "  violation " << s.name << " " << family_name(kind) << " eps=" << to_string(eps)
                                      << " n=" << n << " error=" << to_string(err) << "\n";
                        }
                        worst = std::max(worst, to_double(err / eps));
                    }
                }
            }
    report(violations == 0, "end_to_end",
           std::to_string(checks) + " snapshots over 20 streams x {64,256,512} x {halfplane,quadrant} x eps {1/2,1/4}; " +
               std::to_string(violations) + " violations; worst error/eps " + fmt(worst));
    report(slot_violations == 0, "budget_telescoping",
           std::to_string(slot_checks) + " level summaries at n in {64,256,511,512}; " + std::to_string(slot_violations) +
               " violations; worst error/cumulative budget " + fmt(worst_slot));
}

// ------------------------------------------------------------------ space

void space_growth() {
    const double limit = 2 * std::pow(std::log2(4096.0) / std::log2(64.0), 3 + 2 * 1);
    double worst = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto pts = make_stream(Shape::Uniform, 4096, seed);
        StreamEngine e(config(FamilyKind::Halfplane, make_rational(1, 4)));
        std::size_t at64 = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            e.insert(pts[i]);
            if (i + 1 == 64) at64 = e.memory_footprint().points_stored;
        }
        const std::size_t at4096 = e.memory_footprint().points_stored;
        const double ratio = static_cast<double>(at4096) / static_cast<double>(at64);
        worst = std::max(worst, ratio);
        if (seed == 1) detail = "points_stored " + std::to_string(at64) + " -> " + std::to_string(at4096);
    }
    report(worst <= limit, "space_growth", detail + "; worst ratio over 5 streams " + fmt(worst) + " <= " + fmt(limit));
}

// ------------------------------------------------------------------ Tukey

void tukey() {
    const Rational eps = make_rational(1, 4);
    std::size_t probes = 0, violations = 0, median_violations = 0;
    double worst = 0, worst_gap = -1;
    for (std::uint64_t k = 0; k < 10; ++k) {
        const Shape shape = epsstream::testing::kShapes[k % 4];
        const auto pts = make_stream(shape, 300, 100 + k);
        const Snapshot snap = streamed(pts, FamilyKind::Halfplane, eps);
        std::int64_t xlo = pts[0].x, xhi = xlo, ylo = pts[0].y, yhi = ylo;
        for (const Point2& p : pts) {
            xlo = std::min(xlo, p.x);
            xhi = std::max(xhi, p.x);
            ylo = std::min(ylo, p.y);
            yhi = std::max(yhi, p.y);
        }
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) {
                const Point2 q{xlo + (xhi - xlo) * (2 * i + 1) / 20, ylo + (yhi - ylo) * (2 * j + 1) / 20};
                const Rational err = abs_diff(tukey_depth(snap, q).value, exact::exact_tukey_depth(pts, RationalPoint(q)));
                ++probes;
                if (err > eps) ++violations;
                worst = std::max(worst, to_double(err));
            }
        const TukeyMedian med = tukey_median(snap);
        const Rational best = exact::exact_max_tukey_depth(pts).depth;
        if (med.depth.value < best - eps || med.depth.value < make_rational(1, 3) - eps) ++median_violations;
        worst_gap = std::max(worst_gap, to_double(best - med.depth.value));
    }
    report(violations == 0 && median_violations == 0, "tukey_depth",
           std::to_string(probes) + " probes on 10 streams n=300 eps=1/4; " + std::to_string(violations) +
               " depth violations (worst error " + fmt(worst) + "); median: " + std::to_string(median_violations) +
               " violations, worst (exact max - returned) " + fmt(worst_gap));
}

// ------------------------------------------------------------------ simplicial

void simplicial() {
    double fitted = 0;
    std::size_t cases = 0, uncovered = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto pts = make_stream(Shape::Uniform, 25, 200 + seed, 1000);
        for (const Rational& eps : {make_rational(1, 4), make_rational(1, 16), make_rational(1, 64), make_rational(1, 256)}) {
            const Snapshot snap = exact_snapshot(pts, FamilyKind::Wedge, eps);
            std::mt19937_64 rng(seed);
            std::uniform_int_distribution<std::int64_t> c(-600, 600);
            for (int t = 0; t < 5; ++t) {
                const Point2 q{c(rng), c(rng)};
                const DepthValue d = simplicial_depth_estimate(snap, q);
                const Rational err = abs_diff(d.value, exact::exact_simplicial_depth(pts, q));
                ++cases;
                if (err > d.additive_bound) ++uncovered;
                fitted = std::max(fitted, to_double(err) / std::sqrt(to_double(eps)));
            }
        }
    }
    report(fitted <= 5 && uncovered == 0, "simplicial_depth",
           std::to_string(cases) + " cases on exact samples n=25, eps in {1/4..1/256}; fitted K " + fmt(fitted) +
               " (limit 5); documented K " + fmt(static_cast<double>(kSimplicialK)) + " covers all but " +
               std::to_string(uncovered));
}

// ------------------------------------------------------------------ regression depth

void regression() {
    std::size_t lines = 0, violations = 0, fit_violations = 0, reduced = 0, snaps = 0;
    double worst = 0;
    for (const Rational& eps : {make_rational(1, 4), make_rational(3, 4)}) {
        for (std::uint64_t k = 0; k < 8; ++k) {
            const auto pts = make_stream(epsstream::testing::kShapes[k % 4], 60, 300 + k);
            const Snapshot snap = streamed(pts, FamilyKind::DoubleWedge, eps);
            ++snaps;
            reduced += snap.sample.size() < WeightedSample::from_points(pts).size();
            std::mt19937_64 rng(k);
            std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
            std::uniform_int_distribution<std::int64_t> shift(-(1 << 18), 1 << 18);
            for (int t = 0; t < 10; ++t) {
                const Point2 a = pts[pick(rng)], b = pts[pick(rng)];
                const Rational slope = a.x == b.x ? Rational(0) : ratio(BigInt(b.y - a.y), BigInt(b.x - a.x));
                const FitLine l{slope, Rational(a.y) - slope * a.x + shift(rng)};
                const Rational err = abs_diff(regression_depth(snap, l).value, exact::exact_regression_depth(pts, l.slope, l.intercept));
                ++lines;
                if (err > eps) ++violations;
                worst = std::max(worst, to_double(err));
            }
            if (max_regression_depth_fit(snap).depth.value < make_rational(1, 3) - eps) ++fit_violations;
        }
    }
    report(violations == 0 && fit_violations == 0, "regression_depth",
           std::to_string(lines) + " lines on 8 streams n=60 eps in {1/4,3/4} (" + std::to_string(reduced) + "/" +
               std::to_string(snaps) + " snapshots reduced); " + std::to_string(violations) +
               " violations (worst error " + fmt(worst) + "); deepest fit below 1/3-eps: " + std::to_string(fit_violations));
}

// ------------------------------------------------------------------ Theil-Sen

void theil_sen() {
    double fitted = 0;
    std::size_t ranks = 0, uncovered = 0, bisect_violations = 0, fits = 0, reduced = 0;
    for (const Rational& eps : {make_rational(1, 4), make_rational(3, 4)}) {
        for (std::size_t n : {24, 200})
            for (std::uint64_t k = 0; k < 6; ++k) {
                const auto pts = make_stream(epsstream::testing::kShapes[k % 4], n, 400 + k);
                const Snapshot snap = streamed(pts, FamilyKind::VParallelogram, eps);
                reduced += snap.sample.size() < WeightedSample::from_points(pts).size();
                std::mt19937_64 rng(k);
                std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
                for (int t = 0; t < 10; ++t) {
                    const Point2 a = pts[pick(rng)], b = pts[pick(rng)];
                    if (a.x == b.x) continue;
                    const Rational s = ratio(BigInt(b.y - a.y), BigInt(b.x - a.x));
                    const DepthValue d = slope_rank_estimate(snap, s);
                    const Rational err = abs_diff(d.value, exact::exact_slope_rank(pts, s));
                    ++ranks;
                    if (err > d.additive_bound) ++uncovered;
                    fitted = std::max(fitted, to_double(err) / std::cbrt(to_double(eps)));
                }
                const FitLine l = theil_sen_fit(snap);
                std::size_t above = 0, below = 0;
                for (const Point2& p : pts) {
                    const Rational r = Rational(p.y) - l.slope * p.x - l.intercept;
                    above += r > 0;
                    below += r < 0;
                }
                ++fits;
                const Rational side_limit = (make_rational(1, 2) + eps) * static_cast<long long>(n);
                if (Rational(static_cast<long long>(std::max(above, below))) > side_limit) ++bisect_violations;
            }
    }
    report(uncovered == 0 && bisect_violations == 0, "theil_sen",
           std::to_string(ranks) + " slope ranks on streams n in {24,200} eps in {1/4,3/4} (" + std::to_string(reduced) +
               "/" + std::to_string(fits) + " snapshots reduced); fitted K " + fmt(fitted) +
               ", documented K " + fmt(static_cast<double>(kSlopeRankK)) + " covers all but " + std::to_string(uncovered) +
               "; bisection within eps*n on " + std::to_string(fits - bisect_violations) + "/" + std::to_string(fits) + " fits");
}

// ------------------------------------------------------------------ LMS

void lms() {
    const Rational eps = make_rational(1, 8);
    const Rational relaxed = make_rational(1, 2) + 2 * eps;
    std::size_t runs = 0, mass_violations = 0, size_violations = 0;
    for (std::uint64_t k = 0; k < 6; ++k) {
        const auto pts = make_stream(epsstream::testing::kShapes[k % 4], 64, 500 + k, 1 << 12);
        const Rational half = make_rational(static_cast<long long>(pts.size()), 2);
        {
            const LmsLocation got = lms_location(streamed(pts, FamilyKind::Disk, eps));
            std::size_t inside = 0;
            for (const Point2& p : pts) {
                const Rational dx = p.x - got.center.x, dy = p.y - got.center.y;
                inside += dx * dx + dy * dy <= got.radius2;
            }
            ++runs;
            if (Rational(static_cast<long long>(inside)) < half) ++mass_violations;
            if (got.radius2 > exact::exact_lms_disk(pts, relaxed).r2) ++size_violations;
        }
        {
            const LmsRegression got = lms_regression(streamed(pts, FamilyKind::Slab, eps));
            std::size_t inside = 0;
            for (const Point2& p : pts) {
                const Rational r = Rational(p.y) - got.line.slope * p.x - got.line.intercept;
                inside += 2 * abs_diff(r, 0) <= got.width;
            }
            ++runs;
            if (Rational(static_cast<long long>(inside)) < half) ++mass_violations;
            if (got.width > exact::exact_lms_slab(pts, relaxed).width) ++size_violations;
        }
    }
    report(mass_violations == 0 && size_violations == 0, "lms",
           std::to_string(runs) + " disk/slab fits on 6 streams n=64 eps=1/8; exact mass below n/2: " +
               std::to_string(mass_violations) + "; larger than oracle at 1/2+2eps: " + std::to_string(size_violations));
}

// ------------------------------------------------------------------ determinism

void determinism() {
    std::size_t compared = 0, mismatches = 0;
    for (FamilyKind kind : {FamilyKind::Halfplane, FamilyKind::Quadrant, FamilyKind::Disk, FamilyKind::Slab}) {
        const auto pts = make_stream(Shape::Clustered, kind == FamilyKind::Disk || kind == FamilyKind::Slab ? 96 : 512, 9);
        auto run = [&] {
            StreamEngine e(config(kind, make_rational(1, 4)));
            for (const Point2& p : pts) e.insert(p);
            return e.to_json().dump() + snapshot_to_json(e.snapshot()).dump();
        };
        const std::string one = run();
        // resume halfway through a serialized state
        StreamEngine first(config(kind, make_rational(1, 4)));
        for (std::size_t i = 0; i < pts.size() / 3; ++i) first.insert(pts[i]);
        StreamEngine resumed = StreamEngine::from_json(nlohmann::json::parse(first.to_json().dump()));
        for (std::size_t i = pts.size() / 3; i < pts.size(); ++i) resumed.insert(pts[i]);
        const std::string two = resumed.to_json().dump() + snapshot_to_json(resumed.snapshot()).dump();
        compared += 2;
        if (one != run()) ++mismatches;
        if (one != two) ++mismatches;
    }
    report(mismatches == 0, "determinism",
           std::to_string(compared) + " byte comparisons (repeat run, resume from serialized state) over 4 families; " +
               std::to_string(mismatches) + " mismatches");
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<std::string, std::function<void()>> criteria{
        {"end_to_end", end_to_end_and_budgets}, {"space", space_growth}, {"tukey", tukey},     {"simplicial", simplicial},
        {"regression", regression},      {"theil_sen", theil_sen}, {"lms", lms},         {"determinism", determinism}};
    const std::vector<std::string> order{"end_to_end", "space", "tukey", "simplicial", "regression", "theil_sen", "lms", "determinism"};
    std::vector<std::string> chosen(argv + 1, argv + argc);
    if (chosen.empty()) chosen = order;
    for (const std::string& name : chosen) {
        auto it = criteria.find(name);
        if (it == criteria.end()) {
            std::cerr << "unknown criterion " << name << "\n";
            return 2;
        }
        try {
            it->second();
        } catch (const std::exception& e) {
            report(false, name, std::string("threw: ") + e.what());
        }
    }
    std::cout << "NOTE not_reproducible: asymptotic running-time constants are not measured; certification checks above stand in\n";
    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
