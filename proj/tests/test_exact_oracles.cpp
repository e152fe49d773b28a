#include "epsstream/exact_oracles.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace epsstream;
using namespace epsstream::exact;

namespace {

const std::vector<Point2> kSquare{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};

// Depth at the best of the arrangement vertices and support points, each
// evaluated by the definition.
Rational vertex_scan_max_depth(const std::vector<Point2>& pts) {
    std::vector<RationalPoint> cands;
    for (const Point2& p : pts) cands.emplace_back(p);
    std::vector<std::pair<Point2, Point2>> lines;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (!(pts[i] == pts[j])) lines.emplace_back(pts[i], pts[j]);
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            const auto [p1, p2] = lines[i];
            const auto [p3, p4] = lines[j];
            const Rational d1x = p2.x - p1.x, d1y = p2.y - p1.y, d2x = p4.x - p3.x, d2y = p4.y - p3.y;
            const Rational det = d1x * d2y - d1y * d2x;
            if (det == 0) continue;
            const Rational t = (Rational(p3.x - p1.x) * d2y - Rational(p3.y - p1.y) * d2x) / det;
            cands.emplace_back(p1.x + t * d1x, p1.y + t * d1y);
        }
    Rational best = 0;
    for (const auto& c : cands) best = std::max(best, exact_tukey_depth(pts, c));
    return best;
}

}  // namespace

TEST(ExactCount, Basics) {
    EXPECT_EQ(exact_count({}, HalfplaneRange{1, 0, 0}), 0u);
    EXPECT_EQ(exact_count(kSquare, HalfplaneRange{0, 0, -1}), 4u);
    std::vector<Point2> grid;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 2; ++j) grid.push_back({i, j});
    EXPECT_EQ(exact_count(grid, QuadrantRange{make_rational(3, 2), make_rational(1, 2)}), 2u);
}

TEST(ExactCount, ComplementsSumToN) {
    const auto pts = epsstream::testing::random_points(50, 4, 20);
    for (int a = -2; a <= 2; ++a)
        for (int t = -9; t <= 9; t += 3) {
            const RangeDescriptor r = HalfplaneRange{a, 1, make_rational(2 * t + 1, 2)};
            const RangeDescriptor c = HalfplaneRange{-a, -1, -make_rational(2 * t + 1, 2)};
            // boundary is never hit: a*x + y is an integer
            EXPECT_EQ(exact_count(pts, r) + exact_count(pts, c), 50u);
        }
}

TEST(ExactTukey, Examples) {
    EXPECT_EQ(exact_tukey_depth(kSquare, RationalPoint(0, 0)), make_rational(1, 2));
    EXPECT_EQ(exact_tukey_depth(kSquare, RationalPoint(5, 0)), 0);
    EXPECT_EQ(exact_tukey_depth(std::vector<Point2>{{3, 4}}, RationalPoint(3, 4)), 1);
    const std::vector<Point2> tri{{0, 0}, {6, 0}, {0, 6}};
    EXPECT_EQ(exact_tukey_depth(tri, RationalPoint(2, 2)), make_rational(1, 3));
    EXPECT_EQ(exact_tukey_depth(tri, RationalPoint(make_rational(1, 3), make_rational(1, 7))), make_rational(1, 3));
    // on an edge, the outward side holds the two edge endpoints
    EXPECT_EQ(exact_tukey_depth(tri, RationalPoint(3, 0)), make_rational(1, 3));
    EXPECT_THROW(exact_tukey_depth({}, RationalPoint(0, 0)), std::invalid_argument);
}

TEST(ExactTukey, CollinearAndDuplicates) {
    const std::vector<Point2> line{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {3, 3}};
    EXPECT_EQ(exact_tukey_depth(line, RationalPoint(2, 2)), make_rational(3, 5));
    EXPECT_EQ(exact_tukey_depth(line, RationalPoint(3, 3)), make_rational(2, 5));
    EXPECT_EQ(exact_tukey_depth(line, RationalPoint(1, 0)), 0);
    EXPECT_EQ(exact_tukey_depth(line, RationalPoint(make_rational(3, 2), make_rational(3, 2))), make_rational(2, 5));
}

TEST(ExactTukey, MaxDepthMatchesVertexScan) {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        auto pts = epsstream::testing::random_points(4 + seed % 6, 300 + seed, 6);
        if (seed % 3 == 0) pts.push_back(pts.front());
        const DeepestPoint d = exact_max_tukey_depth(pts);
        EXPECT_EQ(d.depth, vertex_scan_max_depth(pts)) << "seed " << seed;
        EXPECT_EQ(exact_tukey_depth(pts, d.point), d.depth) << "seed " << seed;
    }
}

TEST(ExactTukey, MaxDepthExamples) {
    EXPECT_EQ(exact_max_tukey_depth(kSquare).depth, make_rational(1, 2));
    EXPECT_EQ(exact_max_tukey_depth(kSquare).point, RationalPoint(0, 0));
    EXPECT_EQ(exact_max_tukey_depth(std::vector<Point2>{{0, 0}, {6, 0}, {0, 6}}).depth, make_rational(1, 3));
    EXPECT_EQ(exact_max_tukey_depth(std::vector<Point2>{{2, 2}}).depth, 1);
    const DeepestPoint line = exact_max_tukey_depth(std::vector<Point2>{{0, 0}, {1, 0}, {2, 0}});
    EXPECT_EQ(line.depth, make_rational(2, 3));
    EXPECT_EQ(line.point, RationalPoint(1, 0));
}

TEST(ExactSimplicial, Examples) {
    const std::vector<Point2> tri{{0, 0}, {6, 0}, {0, 6}};
    EXPECT_EQ(exact_simplicial_depth(tri, {1, 1}), 1);
    EXPECT_EQ(exact_simplicial_depth(tri, {6, 6}), 0);
    EXPECT_EQ(exact_simplicial_depth(tri, {3, 0}), 1);  // closed triangle
    EXPECT_EQ(exact_simplicial_depth(kSquare, {0, 0}), 1);
    EXPECT_EQ(exact_simplicial_depth(kSquare, {0, -1}), make_rational(1, 2));
    EXPECT_THROW(exact_simplicial_depth(std::vector<Point2>{{0, 0}, {1, 1}}, {0, 0}), std::invalid_argument);
    const std::vector<Point2> line{{0, 0}, {2, 0}, {4, 0}};
    EXPECT_EQ(exact_simplicial_depth(line, {1, 0}), 1);
    EXPECT_EQ(exact_simplicial_depth(line, {5, 0}), 0);
}

TEST(ExactSimplicial, MatchesBarycentricCount) {
    const auto pts = epsstream::testing::random_points(10, 9, 1000);
    const Point2 q{0, 0};
    std::uint64_t inside = 0;
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = i + 1; j < 10; ++j)
            for (std::size_t k = j + 1; k < 10; ++k) {
                // solve q = a + s(b-a) + t(c-a); inside iff s,t >= 0 and s+t <= 1
                const Rational bx = pts[j].x - pts[i].x, by = pts[j].y - pts[i].y;
                const Rational cx = pts[k].x - pts[i].x, cy = pts[k].y - pts[i].y;
                const Rational qx = q.x - pts[i].x, qy = q.y - pts[i].y;
                const Rational det = bx * cy - by * cx;
                ASSERT_NE(det, 0);
                const Rational s = (qx * cy - qy * cx) / det, t = (bx * qy - by * qx) / det;
                inside += (s >= 0 && t >= 0 && s + t <= 1) ? 1 : 0;
            }
    EXPECT_EQ(exact_simplicial_depth(pts, q), Rational(static_cast<long long>(inside)) / 120);
}

TEST(ExactRegression, Examples) {
    const std::vector<Point2> zig{{0, 0}, {1, 1}, {2, 0}, {3, 1}};
    EXPECT_EQ(exact_regression_depth(zig, 0, -5), 0);
    EXPECT_EQ(exact_regression_depth(zig, 0, make_rational(1, 2)), make_rational(1, 4));
    EXPECT_EQ(exact_regression_depth(std::vector<Point2>{{0, 1}, {4, 9}}, 2, 1), 1);
    const std::vector<Point2> line{{0, 1}, {1, 3}, {2, 5}, {3, 7}};
    EXPECT_EQ(exact_regression_depth(line, 2, 1), 1);
    EXPECT_EQ(exact_regression_depth(line, 2, 0), 0);
}

TEST(ExactSlopeRank, Examples) {
    const std::vector<Point2> line{{0, 0}, {1, 2}, {3, 6}};
    EXPECT_EQ(exact_slope_rank(line, 3), 1);
    EXPECT_EQ(exact_slope_rank(line, 1), 0);
    EXPECT_EQ(exact_slope_rank(line, 2), make_rational(1, 2));
    EXPECT_EQ(exact_slope_rank(std::vector<Point2>{{0, 0}, {0, 5}}, 1000), 0);
    EXPECT_THROW(exact_slope_rank(std::vector<Point2>{{0, 0}}, 0), std::invalid_argument);
}

TEST(ExactLms, Disk) {
    EXPECT_EQ(exact_lms_disk(std::vector<Point2>{{4, 4}}, 1).r2, 0);
    const std::vector<Point2> axis{{0, 0}, {1, 0}, {10, 0}, {11, 0}};
    const LmsDisk half = exact_lms_disk(axis, make_rational(1, 2));
    EXPECT_EQ(half.r2, make_rational(1, 4));
    EXPECT_EQ(half.center, RationalPoint(make_rational(1, 2), 0));
    EXPECT_EQ(exact_lms_disk(axis, make_rational(3, 4)).r2, 25);
    EXPECT_THROW(exact_lms_disk(axis, 0), std::invalid_argument);
    const LmsDisk tri = exact_lms_disk(std::vector<Point2>{{0, 0}, {4, 0}, {0, 4}, {50, 50}}, make_rational(3, 4));
    EXPECT_EQ(tri.r2, 8);
    EXPECT_EQ(tri.center, RationalPoint(2, 2));
}

TEST(ExactLms, Slab) {
    const std::vector<Point2> pts{{0, 0}, {1, 1}, {2, 2}, {0, 9}, {5, -7}};
    const LmsSlab s = exact_lms_slab(pts, make_rational(3, 5));
    EXPECT_EQ(s.width, 0);
    EXPECT_EQ(s.slope, 1);
    EXPECT_EQ(s.intercept, 0);
    const std::vector<Point2> levels{{0, 0}, {3, 0}, {0, 1}, {3, 1}};
    EXPECT_EQ(exact_lms_slab(levels, make_rational(1, 2)).width, 0);
    EXPECT_EQ(exact_lms_slab(levels, 1).width, 1);
}

TEST(ExactDiscrepancy, Examples) {
    const WeightedSample ground = WeightedSample::from_points(std::vector<Point2>{{0, 0}, {4, 0}});
    EXPECT_EQ(exact_discrepancy(ground, ground, FamilyKind::Halfplane), 0);
    WeightedSample one;
    one.points = {{0, 0}};
    one.weights = {2};
    one.total_weight = 2;
    EXPECT_EQ(exact_discrepancy(ground, one, FamilyKind::Halfplane), make_rational(1, 2));
    EXPECT_EQ(exact_discrepancy(ground, WeightedSample{}, FamilyKind::Halfplane), 1);
    const std::vector<Point2> raw{{0, 0}, {4, 0}};
    EXPECT_EQ(exact_discrepancy(raw, one, FamilyKind::Halfplane), make_rational(1, 2));
}

TEST(ExactOracles, Caps) {
    const auto big = epsstream::testing::random_points(61, 1, 1000);
    EXPECT_THROW(exact_regression_depth(big, 0, 0), CapExceeded);
    EXPECT_THROW(exact_simplicial_depth(std::span(big).first(26), {0, 0}), CapExceeded);
}
