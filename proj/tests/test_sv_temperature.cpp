#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "test_support.hpp"

using namespace mprfill;
using testing_support::angle_field;
using testing_support::enumerate_bonds;

namespace {

const CalibrationCurve& curve() {
    static const CalibrationCurve c({{0.0, -1.0}, {0.1, -0.97}, {0.2, -0.94}, {0.4, -0.88}, {10.0, -0.45}}, {});
    return c;
}

// Direct disc convolution: every pass scans all sites of the grid.
TemperatureField brute_smooth(const TemperatureField& in, double r, int passes) {
    TemperatureField f = in;
    const auto s = f.shape;
    for (int p = 0; p < passes; ++p) {
        std::vector<double> next(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            double sum = 0.0;
            int n = 0;
            for (std::size_t j = 0; j < s.size(); ++j) {
                const double dr = s.row_of(i) - s.row_of(j);
                const double dc = s.col_of(i) - s.col_of(j);
                if (dr * dr + dc * dc <= r * r) {
                    sum += f.values[j];
                    ++n;
                }
            }
            next[i] = sum / n;
        }
        f.values = next;
    }
    return f;
}

TemperatureField random_temps(GridShape s, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    TemperatureField f = uniform_temperature(s, 0.0);
    for (auto& v : f.values) v = u(gen);
    return f;
}

BlockTemperatureStats stats_with(std::vector<double> temps_or_empty) {
    BlockTemperatureStats st;
    for (double t : temps_or_empty) {
        BlockTemperature b;
        if (t >= 0.0) {
            b.energy = {curve().energy_at(t), 4};
        }
        st.blocks.push_back(b);
    }
    return st;
}

}  // namespace

TEST(BlockEnergies, SingleBlockEqualsGlobal) {
    const GridField g = testing_support::random_masked_grid({13, 9}, 3, 0.3);
    const auto f = to_angles(g, transform_params_from_samples(g));
    const auto st = block_sample_energies(f, make_blocks(f.shape, 64), {});
    ASSERT_EQ(st.blocks.size(), 1u);
    const auto global = sample_specific_energy(f, {});
    EXPECT_EQ(st.blocks[0].energy.bond_count, global.bond_count);
    EXPECT_NEAR(st.blocks[0].energy.energy, global.energy, 1e-14);
}

TEST(BlockEnergies, ConstantBlockIsAligned) {
    std::vector<double> a(16, 1.0);
    for (std::size_t i : {2u, 3u, 6u, 7u}) a[i] = 0.3 * static_cast<double>(i);
    const auto st = block_sample_energies(angle_field({4, 4}, a), make_blocks({4, 4}, 2), {});
    EXPECT_DOUBLE_EQ(st.blocks[0].energy.energy, -1.0);
    EXPECT_EQ(st.blocks[0].energy.bond_count, 4u);
    EXPECT_GT(st.blocks[1].energy.energy, -1.0);
}

TEST(BlockEnergiesProperty, MatchBruteForcePerBlock) {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    std::bernoulli_distribution miss(0.35);
    for (int trial = 0; trial < 20; ++trial) {
        const GridShape s{4 + trial % 5, 4 + trial % 3};
        std::vector<double> a(s.size());
        for (auto& x : a) x = u(gen);
        auto f = angle_field(s, a);
        for (auto& st : f.state)
            if (miss(gen)) st = SpinState::Free;
        for (int lb : {2, 3}) {
            const auto blocks = make_blocks(s, lb);
            const auto got = block_sample_energies(f, blocks, {}, Threads{2});
            for (std::size_t b = 0; b < blocks.block_count(); ++b) {
                const auto [e, n] = enumerate_bonds(f, 0.5, [&](std::size_t i, std::size_t j) {
                    return f.is_fixed(i) && f.is_fixed(j) && blocks.block_of(i) == b && blocks.block_of(j) == b;
                });
                EXPECT_EQ(got.blocks[b].energy.bond_count, n);
                EXPECT_EQ(got.blocks[b].fallback, n == 0);
                if (n) {
                    EXPECT_NEAR(got.blocks[b].energy.energy, e, 1e-12);
                }
            }
        }
    }
}

TEST(AssignTemperatures, EmptyBlockTakesMedian) {
    const auto st = assign_block_temperatures(stats_with({0.1, 0.2, 0.4, -1.0}), curve());
    EXPECT_NEAR(st.blocks[0].temperature, 0.1, 1e-12);
    EXPECT_NEAR(st.blocks[2].temperature, 0.4, 1e-12);
    EXPECT_TRUE(st.blocks[3].fallback);
    EXPECT_NEAR(st.blocks[3].temperature, 0.2, 1e-12);
}

TEST(AssignTemperatures, EvenCountUsesLowerMedian) {
    const auto st = assign_block_temperatures(stats_with({0.1, 0.4, -1.0, 0.2, 3.0}), curve());
    EXPECT_NEAR(st.blocks[2].temperature, 0.2, 1e-12);
    EXPECT_EQ(lower_median({4.0, 1.0, 3.0, 2.0}), 2.0);
    EXPECT_EQ(lower_median({5.0}), 5.0);
    EXPECT_THROW(lower_median({}), Error);
}

TEST(AssignTemperatures, AlignedBlockGetsMinimumTemperature) {
    BlockTemperatureStats st;
    st.blocks.push_back({{-1.0, 10}, 0.0, false, false});
    const auto out = assign_block_temperatures(st, curve());
    EXPECT_EQ(out.blocks[0].temperature, curve().t_min());
}

TEST(AssignTemperatures, AllEmptyFallsBackToGlobal) {
    const auto st = assign_block_temperatures(stats_with({-1.0, -1.0}), curve(), BondEnergyStats{-0.94, 12});
    EXPECT_TRUE(st.global_fallback);
    EXPECT_FALSE(st.warnings.empty());
    for (const auto& b : st.blocks) EXPECT_NEAR(b.temperature, 0.2, 1e-12);
    EXPECT_THROW(assign_block_temperatures(stats_with({-1.0}), curve()), Error);
}

TEST(AssignTemperaturesProperty, FallbackEqualsMedianOnRandomMasks) {
    for (unsigned seed = 1; seed <= 15; ++seed) {
        const GridField g = testing_support::random_masked_grid({24, 20}, seed, 0.5 + 0.03 * seed);
        const auto f = to_angles(g, transform_params_from_samples(g));
        const auto blocks = make_blocks(f.shape, 3);
        const auto st = assign_block_temperatures(block_sample_energies(f, blocks, {}), curve(),
                                                  sample_specific_energy(f, {}));
        std::vector<double> avail;
        for (const auto& b : st.blocks)
            if (!b.fallback) avail.push_back(b.temperature);
        if (avail.empty()) continue;
        std::sort(avail.begin(), avail.end());
        const double med = avail[(avail.size() - 1) / 2];
        for (const auto& b : st.blocks) {
            EXPECT_EQ(b.fallback, b.energy.bond_count == 0);
            if (b.fallback) {
                EXPECT_EQ(b.temperature, med);
            }
        }
    }
}

TEST(ExpandToSites, StepField) {
    const auto blocks = make_blocks({6, 3}, 3);
    auto st = stats_with({0.1, 0.4});
    st = assign_block_temperatures(st, curve());
    const auto field = expand_to_sites(st, blocks);
    EXPECT_EQ(field.provenance.kind, TemperatureKind::BlockSpecific);
    std::map<double, int> hist;
    for (double v : field.values) ++hist[v];
    ASSERT_EQ(hist.size(), 2u);
    for (auto [v, n] : hist) EXPECT_EQ(n, 9);
    EXPECT_EQ(field.values[0], field.values[2]);
    EXPECT_NE(field.values[2], field.values[3]);

    const auto one = expand_to_sites(assign_block_temperatures(stats_with({0.2}), curve()), make_blocks({5, 5}, 8));
    for (double v : one.values) EXPECT_EQ(v, one.values[0]);
}

TEST(ExpandToSites, HistogramProportionalToArea) {
    const auto blocks = make_blocks({5, 5}, 3);
    const auto field =
        expand_to_sites(assign_block_temperatures(stats_with({0.1, 0.2, 0.4, 1.0}), curve()), blocks);
    std::map<double, int> hist;
    for (double v : field.values) ++hist[v];
    std::vector<int> counts;
    for (auto [v, n] : hist) counts.push_back(n);
    EXPECT_EQ(counts, (std::vector<int>{9, 6, 6, 4}));
}

TEST(Smooth, UniformFieldIsFixedPoint) {
    const auto f = uniform_temperature({9, 7}, 0.37);
    const auto out = smooth_temperatures(f, 2.5, 4);
    for (double v : out.values) EXPECT_DOUBLE_EQ(v, 0.37);
    EXPECT_EQ(out.provenance.kind, TemperatureKind::SiteSpecific);
}

TEST(Smooth, ZeroPassesIsIdentity) {
    const auto f = random_temps({8, 8}, 1);
    EXPECT_EQ(smooth_temperatures(f, 3.0, 0).values, f.values);
}

TEST(Smooth, DeltaFieldMatchesHandConvolution) {
    auto f = uniform_temperature({5, 5}, 0.0);
    f.values[12] = 1.0;
    const auto out = smooth_temperatures(f, 1.0, 1);
    // Interior discs of radius 1 have 5 sites.
    EXPECT_DOUBLE_EQ(out.values[12], 1.0 / 5.0);
    for (std::size_t n : {7u, 11u, 13u, 17u}) EXPECT_DOUBLE_EQ(out.values[n], 1.0 / 5.0);
    EXPECT_EQ(out.values[6], 0.0);
    const auto oracle = brute_smooth(f, 1.0, 1);
    for (std::size_t i = 0; i < 25; ++i) EXPECT_NEAR(out.values[i], oracle.values[i], 1e-15);

    auto corner = uniform_temperature({5, 5}, 0.0);
    corner.values[0] = 1.0;
    const auto oc = smooth_temperatures(corner, 1.0, 1);
    EXPECT_DOUBLE_EQ(oc.values[0], 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(oc.values[1], 1.0 / 4.0);
}

TEST(SmoothProperty, MatchesBruteForceAndContractsRange) {
    for (unsigned seed = 1; seed <= 12; ++seed) {
        const GridShape s{7 + static_cast<int>(seed % 5), 6 + static_cast<int>(seed % 4)};
        const auto f = random_temps(s, seed);
        const double r = 1.0 + 0.7 * (seed % 4);
        const int passes = static_cast<int>(seed % 4);
        const auto got = smooth_temperatures(f, r, passes, Threads{3});
        const auto want = brute_smooth(f, r, passes);
        const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
        for (std::size_t i = 0; i < s.size(); ++i) {
            EXPECT_NEAR(got.values[i], want.values[i], 1e-12);
            EXPECT_GE(got.values[i], *lo);
            EXPECT_LE(got.values[i], *hi);
        }
    }
}

TEST(Smooth, RejectsBadParameters) {
    const auto f = uniform_temperature({3, 3}, 1.0);
    EXPECT_THROW(smooth_temperatures(f, 0.5, 1), Error);
    EXPECT_THROW(smooth_temperatures(f, 1.0, -1), Error);
}

TEST(SvProperty, LargeBlockDegeneratesToUniformMpr) {
    const GridField g = testing_support::random_masked_grid({20, 14}, 8, 0.4);
    const auto f = to_angles(g, transform_params_from_samples(g));
    const auto curve_ = testing_support::small_curve();
    MethodConfig cfg;
    cfg.method = Method::SvmprBst;
    cfg.block_size = 20;
    FillResult rep_bst, rep_mpr;
    const auto bst = infer_temperatures(f, cfg, curve_, rep_bst);
    cfg.method = Method::Mpr;
    const auto mpr = infer_temperatures(f, cfg, curve_, rep_mpr);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(bst.values[i], mpr.values[i], 1e-9);
}

TEST(TemperatureField, ValidationAndDescription) {
    auto f = uniform_temperature({2, 2}, 0.5);
    EXPECT_NO_THROW(f.validate());
    f.values[1] = std::nan("");
    EXPECT_THROW(f.validate(), Error);
    f.values[1] = -0.1;
    EXPECT_THROW(f.validate(), Error);
    EXPECT_EQ(uniform_temperature({2, 2}, 1.0).provenance.describe(), "UNIFORM");
}
