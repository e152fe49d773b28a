#include "epsstream/exact_oracles.hpp"
#include "epsstream/range_queries.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace epsstream;

namespace {

Snapshot build(const std::vector<Point2>& pts, FamilyKind kind, const Rational& eps) {
    EngineConfig cfg;
    cfg.eps = eps;
    cfg.family = kind;
    StreamEngine e(cfg);
    for (const Point2& p : pts) e.insert(p);
    return e.snapshot();
}

}  // namespace

TEST(ApproxCount, EmptyAndFull) {
    const auto pts = epsstream::testing::random_points(40, 3, 100);
    const Snapshot snap = build(pts, FamilyKind::Slab, make_rational(1, 4));
    const CountEstimate none = approx_count(snap, SlabRange{0, -500, -500});
    EXPECT_EQ(none.estimate, 0);
    EXPECT_EQ(none.additive_bound, 10);
    const CountEstimate all = approx_count(snap, SlabRange{0, -500, 500});
    EXPECT_EQ(all.estimate, 40);
    EXPECT_EQ(all.n, 40u);
}

TEST(ApproxCount, GridQuadrant) {
    std::vector<Point2> grid;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 2; ++j) grid.push_back({i, j});
    const Snapshot snap = build(grid, FamilyKind::Quadrant, make_rational(1, 4));
    const RangeDescriptor apex = QuadrantRange{make_rational(3, 2), make_rational(1, 2)};
    const auto truth = exact::exact_count(grid, apex);
    EXPECT_EQ(truth, 2u);
    Rational diff = approx_count(snap, apex).estimate - Rational(truth);
    if (diff < 0) diff = -diff;
    EXPECT_LE(diff, 2);
}

TEST(ApproxCount, FamilyMismatch) {
    const Snapshot snap = build({{0, 0}, {1, 1}}, FamilyKind::Halfplane, make_rational(1, 4));
    EXPECT_THROW(approx_count(snap, SlabRange{0, 0, 1}), FamilyMismatch);
}

TEST(ApproxCount, WithinBoundOnCanonicalRanges) {
    for (FamilyKind kind : {FamilyKind::Halfplane, FamilyKind::Quadrant, FamilyKind::Disk}) {
        const std::size_t n = kind == FamilyKind::Disk ? 12 : 48;
        const auto pts = epsstream::testing::random_points(n, 11, 30);
        const Snapshot snap = build(pts, kind, make_rational(1, 4));
        for (const RangeDescriptor& r : canonical_ranges(RangeFamily(kind, 4096), pts)) {
            Rational diff = approx_count(snap, r).estimate - Rational(exact::exact_count(pts, r));
            if (diff < 0) diff = -diff;
            ASSERT_LE(diff, snap.sample.eps_bound * Rational(n)) << family_name(kind);
        }
    }
}

TEST(Iceberg, Examples) {
    const auto pts = epsstream::testing::random_points(32, 5, 50);
    const Snapshot snap = build(pts, FamilyKind::Halfplane, make_rational(1, 4));
    const RangeDescriptor all = HalfplaneRange{0, 0, -1};
    const RangeDescriptor none = HalfplaneRange{1, 0, 1000};
    EXPECT_EQ(iceberg_query(snap, all, make_rational(1, 2)), IcebergVerdict::Above);
    EXPECT_EQ(iceberg_query(snap, none, make_rational(1, 2)), IcebergVerdict::Below);
    EXPECT_THROW(iceberg_query(snap, all, 1), std::invalid_argument);
    EXPECT_EQ(verdict_name(IcebergVerdict::Uncertain), "uncertain");
}

TEST(Iceberg, ExactThetaIsUncertain) {
    // Right half of a symmetric line of points holds exactly half.
    std::vector<Point2> pts;
    for (int i = -4; i < 4; ++i) pts.push_back({2 * i + 1, 0});
    const Snapshot snap = build(pts, FamilyKind::Halfplane, make_rational(1, 4));
    EXPECT_EQ(iceberg_query(snap, HalfplaneRange{1, 0, 0}, make_rational(1, 2)), IcebergVerdict::Uncertain);
}

TEST(Iceberg, SoundOnSmallStreams) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto pts = epsstream::testing::random_points(16, 100 + seed, 12);
        for (FamilyKind kind : {FamilyKind::Halfplane, FamilyKind::Slab}) {
            const Snapshot snap = build(pts, kind, make_rational(1, 5));
            for (const RangeDescriptor& r : canonical_ranges(RangeFamily(kind, 4096), pts)) {
                const Rational truth = Rational(exact::exact_count(pts, r)) / 16;
                for (int k = 1; k < 8; ++k) {
                    const Rational theta = make_rational(k, 8);
                    const IcebergVerdict v = iceberg_query(snap, r, theta);
                    if (v == IcebergVerdict::Above) { ASSERT_GE(truth, theta); }
                    if (v == IcebergVerdict::Below) { ASSERT_LE(truth, theta); }
                }
            }
        }
    }
}

TEST(EpsNet, SinglePoint) {
    const Snapshot snap = build({{7, -3}}, FamilyKind::Halfplane, make_rational(1, 2));
    EXPECT_EQ(eps_net(snap), (std::vector<Point2>{{7, -3}}));
}

TEST(EpsNet, HitsHeavyHalfplanes) {
    const auto pts = epsstream::testing::random_points(10, 21, 40);
    const Snapshot snap = build(pts, FamilyKind::Halfplane, make_rational(1, 2));
    const auto net = eps_net(snap);
    std::size_t heavy = 0;
    for (const RangeDescriptor& r : canonical_ranges(RangeFamily(FamilyKind::Halfplane, 4096), pts)) {
        if (exact::exact_count(pts, r) < 6) continue;
        ++heavy;
        EXPECT_GT(exact::exact_count(net, r), 0u);
    }
    EXPECT_GT(heavy, 0u);
}
