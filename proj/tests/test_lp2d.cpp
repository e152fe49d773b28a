#include "epsstream/lp2d.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace epsstream;

namespace {

// Lexicographic minimum of a polygon sits at a vertex, so scan all pairwise
// line intersections.
std::optional<RationalPoint> brute_lexmin(const std::vector<LinearConstraint>& hs, const Box& box) {
    std::vector<LinearConstraint> all = hs;
    all.push_back({1, 0, box.xlo});
    all.push_back({-1, 0, -box.xhi});
    all.push_back({0, 1, box.ylo});
    all.push_back({0, -1, -box.yhi});
    std::optional<RationalPoint> best;
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            const auto& p = all[i];
            const auto& q = all[j];
            const Rational det = p.a * q.b - p.b * q.a;
            if (det == 0) continue;
            const RationalPoint v((p.c * q.b - p.b * q.c) / det, (p.a * q.c - p.c * q.a) / det);
            bool ok = true;
            for (const auto& h : all) ok = ok && h.holds(v);
            if (ok && (!best || v.x < best->x || (v.x == best->x && v.y < best->y))) best = v;
        }
    return best;
}

}  // namespace

TEST(Lp2d, BoxOnly) {
    const Box box{-2, 3, 1, 5};
    auto v = lexmin_feasible({}, box);
    ASSERT_TRUE(v);
    EXPECT_EQ(*v, RationalPoint(-2, 1));
}

TEST(Lp2d, Triangle) {
    // x + y >= 1, x >= 0, y >= 0 within [-10,10]^2: lexmin (0, 1)
    std::vector<LinearConstraint> hs{{1, 1, 1}, {1, 0, 0}, {0, 1, 0}};
    auto v = lexmin_feasible(hs, Box{-10, 10, -10, 10});
    ASSERT_TRUE(v);
    EXPECT_EQ(*v, RationalPoint(0, 1));
}

TEST(Lp2d, Infeasible) {
    std::vector<LinearConstraint> hs{{1, 0, 1}, {-1, 0, 0}};
    EXPECT_FALSE(lexmin_feasible(hs, Box{-5, 5, -5, 5}));
    std::vector<LinearConstraint> degenerate{{0, 0, 1}};
    EXPECT_FALSE(lexmin_feasible(degenerate, Box{-5, 5, -5, 5}));
}

TEST(Lp2d, SinglePointRegion) {
    std::vector<LinearConstraint> hs{{1, 1, 2}, {-1, -1, -2}, {1, -1, 0}, {-1, 1, 0}};
    auto v = lexmin_feasible(hs, Box{-5, 5, -5, 5});
    ASSERT_TRUE(v);
    EXPECT_EQ(*v, RationalPoint(1, 1));
}

TEST(Lp2d, MatchesVertexScan) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> coef(-6, 6);
    int feasible = 0;
    for (int trial = 0; trial < 400; ++trial) {
        std::vector<LinearConstraint> hs;
        const int m = 1 + trial % 9;
        for (int i = 0; i < m; ++i) {
            int a = coef(rng), b = coef(rng);
            if (a == 0 && b == 0) a = 1;
            hs.push_back({a, b, coef(rng)});
        }
        const Box box{-7, 7, -7, 7};
        auto got = lexmin_feasible(hs, box);
        auto want = brute_lexmin(hs, box);
        ASSERT_EQ(got.has_value(), want.has_value()) << "trial " << trial;
        if (got) {
            ++feasible;
            EXPECT_EQ(*got, *want) << "trial " << trial;
        }
    }
    EXPECT_GT(feasible, 50);
}
