#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "test_support.hpp"

using namespace mprfill;
using testing_support::random_masked_grid;

TEST(Grid, ParityExamples) {
    EXPECT_EQ(checkerboard_parity(0, 0), Color::A);
    EXPECT_EQ(checkerboard_parity(0, 1), Color::B);
    EXPECT_EQ(checkerboard_parity(3, 5), Color::A);
}

TEST(Grid, NeighborsAreOpenBoundary) {
    const GridShape s{5, 4};
    EXPECT_EQ(neighbors(s, 0, 0).size(), 2u);
    EXPECT_EQ(neighbors(s, 0, 2).size(), 3u);
    EXPECT_EQ(neighbors(s, 2, 2).size(), 4u);
    EXPECT_EQ(neighbors(s, 3, 4).size(), 2u);
}

TEST(Grid, NeighborsRejectOutsideSites) {
    const GridShape s{3, 3};
    EXPECT_THROW(neighbors(s, 3, 0), Error);
    EXPECT_THROW(neighbors(s, -1, 0), Error);
    try {
        neighbors(s, std::size_t{9});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.error_class(), ErrorClass::IndexOutOfRange);
    }
}

TEST(GridProperty, Bipartiteness) {
    for (GridShape s : {GridShape{1, 1}, GridShape{7, 3}, GridShape{16, 16}, GridShape{13, 29}}) {
        std::size_t bonds = 0;
        for (int r = 0; r < s.height; ++r)
            for (int c = 0; c < s.width; ++c)
                for (auto n : neighbors(s, r, c)) {
                    EXPECT_NE(checkerboard_parity(r, c), checkerboard_parity(s.row_of(n), s.col_of(n)));
                    ++bonds;
                }
        EXPECT_EQ(bonds, 2 * s.bond_count());
    }
}

TEST(Grid, ConstructorsAndMask) {
    GridField g(GridShape{3, 2});
    EXPECT_EQ(g.sample_count(), 0u);
    EXPECT_EQ(g.missing_count(), 6u);
    g.set_value(4, 2.5);
    EXPECT_TRUE(g.is_sample(4));
    EXPECT_EQ(g.value(1, 1), 2.5);
    g.set_missing(4);
    EXPECT_TRUE(g.is_missing(4));
    EXPECT_THROW(GridField(GridShape{0, 3}), Error);
    EXPECT_THROW(GridField(GridShape{2, 2}, {1, 2, 3}, std::vector<SiteState>(4, SiteState::Sample)), Error);
}

TEST(Grid, MissingValuesAreNotStoredAsData) {
    GridField g(GridShape{2, 1}, {1.0, 2.0}, {SiteState::Sample, SiteState::Missing});
    EXPECT_EQ(g.sample_count(), 1u);
    EXPECT_EQ(transform_params_from_samples(g).z_max, 1.0);
}

TEST(Grid, TransformEndpointsAndMidpoint) {
    const TransformParams p{-3.0, 5.0};
    const GridField g = GridField::fully_sampled({3, 1}, {-3.0, 5.0, 1.0});
    const AngleField f = to_angles(g, p);
    EXPECT_EQ(f.angles[0], 0.0);
    EXPECT_DOUBLE_EQ(f.angles[1], kTwoPi);
    EXPECT_DOUBLE_EQ(f.angles[2], std::numbers::pi);
    EXPECT_EQ(angle_to_value(0.0, p), -3.0);
    EXPECT_DOUBLE_EQ(angle_to_value(kTwoPi, p), 5.0);
}

TEST(Grid, TransformDegenerateRange) {
    const GridField g = GridField::fully_sampled({2, 1}, {4.0, 4.0});
    try {
        to_angles(g, transform_params_from_samples(g));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.error_class(), ErrorClass::DegenerateRange);
    }
}

TEST(Grid, TransformMarksMissingFree) {
    const GridField g(GridShape{2, 1}, {0.0, 1.0}, {SiteState::Sample, SiteState::Missing});
    const AngleField f = to_angles(g, {0.0, 2.0});
    EXPECT_TRUE(f.is_fixed(0));
    EXPECT_FALSE(f.is_fixed(1));
    EXPECT_EQ(f.free_count(), 1u);
}

TEST(GridProperty, TransformRoundTrip) {
    for (unsigned seed = 1; seed <= 20; ++seed) {
        const GridField g = random_masked_grid({17, 11}, seed, 0.3);
        const TransformParams p = transform_params_from_samples(g);
        const GridField back = from_angles(to_angles(g, p), p);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!g.is_sample(i)) continue;
            const double z = g.value(i);
            EXPECT_LE(std::abs(back.value(i) - z), 1e-12 * std::max(1.0, std::abs(z)));
        }
    }
}

TEST(Grid, BlockExamples) {
    EXPECT_EQ(make_blocks({256, 256}, 32).block_count(), 64u);
    EXPECT_EQ(make_blocks({256, 256}, 256).block_count(), 1u);
    EXPECT_EQ(make_blocks({256, 256}, 1000).block_count(), 1u);
    const auto b = make_blocks({10, 10}, 4);
    EXPECT_EQ(b.blocks_x(), 3);
    EXPECT_EQ(b.blocks_y(), 3);
    EXPECT_EQ(b.block_width(0), 4);
    EXPECT_EQ(b.block_width(1), 4);
    EXPECT_EQ(b.block_width(2), 2);
    EXPECT_EQ(b.block_height(8), 2);
    EXPECT_THROW(make_blocks({10, 10}, 1), Error);
}

TEST(GridProperty, BlockPartition) {
    for (GridShape s : {GridShape{10, 10}, GridShape{33, 17}, GridShape{5, 64}})
        for (int lb : {2, 3, 4, 7, 16, 100}) {
            const auto b = make_blocks(s, lb);
            std::map<std::size_t, std::size_t> count;
            for (std::size_t i = 0; i < s.size(); ++i) {
                ASSERT_LT(b.block_of(i), b.block_count());
                ++count[b.block_of(i)];
            }
            std::size_t total = 0;
            for (std::size_t k = 0; k < b.block_count(); ++k) {
                EXPECT_EQ(count[k], static_cast<std::size_t>(b.block_width(k) * b.block_height(k)));
                total += count[k];
            }
            EXPECT_EQ(total, s.size());
        }
}
