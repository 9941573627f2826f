#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "test_support.hpp"

using namespace mprfill;

namespace {

double std_dev(const GridField& g, int r0, int r1, int c0, int c1) {
    double s = 0.0, s2 = 0.0;
    int n = 0;
    for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) {
            const double v = g.value(r, c);
            s += v;
            s2 += v * v;
            ++n;
        }
    const double m = s / n;
    return std::sqrt(s2 / n - m * m);
}

}  // namespace

TEST(Thinning, RemovesExactCount) {
    const GridField g = testing_support::random_grid({16, 16}, 1);
    const auto t = make_thinning(g, {0.5, 1, 3}, 0);
    EXPECT_EQ(t.thinned.missing_count(), 128u);
    EXPECT_EQ(t.held_out.size(), 128u);
    for (std::size_t k = 0; k < t.held_out.size(); ++k) {
        EXPECT_TRUE(t.thinned.is_missing(t.held_out[k]));
        EXPECT_EQ(t.truth[k], g.value(t.held_out[k]));
    }
}

TEST(Thinning, FractionExactForManyRatios) {
    const GridField g = testing_support::random_grid({23, 17}, 4);
    for (double p : {0.1, 0.3, 0.55, 0.85, 0.9}) {
        const auto t = make_thinning(g, {p, 1, 1}, 2);
        EXPECT_EQ(t.thinned.missing_count(), static_cast<std::size_t>(std::llround(p * 23 * 17)));
    }
}

TEST(Thinning, DeterministicPerRealization) {
    const GridField g = testing_support::random_grid({16, 16}, 1);
    EXPECT_EQ(make_thinning(g, {0.3, 5, 9}, 4).held_out, make_thinning(g, {0.3, 5, 9}, 4).held_out);
    EXPECT_NE(make_thinning(g, {0.3, 5, 9}, 4).held_out, make_thinning(g, {0.3, 5, 10}, 4).held_out);
}

TEST(Thinning, HundredMasksDistinct) {
    const GridField g = testing_support::random_grid({16, 16}, 1);
    const auto all = make_thinnings(g, {0.3, 100, 2});
    std::set<std::vector<std::size_t>> masks;
    for (const auto& t : all) masks.insert(t.held_out);
    EXPECT_EQ(masks.size(), 100u);
}

TEST(Thinning, OnlyThinsSamplesAndRejectsEmptying) {
    GridField g = testing_support::random_grid({10, 10}, 1);
    for (std::size_t i = 0; i < 50; ++i) g.set_missing(i);
    const auto t = make_thinning(g, {0.5, 1, 1}, 0);
    EXPECT_EQ(t.held_out.size(), 25u);
    for (auto site : t.held_out) EXPECT_GE(site, 50u);
    GridField tiny = GridField::fully_sampled({2, 1}, {1.0, 2.0});
    EXPECT_THROW(make_thinning(tiny, {0.9, 1, 1}, 0), Error);
    EXPECT_THROW(make_thinning(g, {1.0, 1, 1}, 0), Error);
    EXPECT_THROW(make_thinning(g, {0.5, 0, 1}, 0), Error);
}

TEST(Score, Examples) {
    const GridField truth = GridField::fully_sampled({2, 1}, {10.0, 20.0});
    const auto t = make_thinning(GridField::fully_sampled({4, 1}, {1.0, 10.0, 20.0, 2.0}), {0.5, 1, 1}, 0);
    Thinning manual{truth, {0, 1}, {10.0, 20.0}};
    EXPECT_EQ(score(truth, manual).aae, 0.0);
    EXPECT_EQ(score(truth, manual).rase, 0.0);

    const GridField off = GridField::fully_sampled({2, 1}, {12.5, 22.5});
    EXPECT_DOUBLE_EQ(score(off, manual).aae, 2.5);
    EXPECT_DOUBLE_EQ(score(off, manual).rase, 2.5);

    const GridField pm = GridField::fully_sampled({2, 1}, {7.0, 24.0});
    EXPECT_DOUBLE_EQ(score(pm, manual).aae, 3.5);
    EXPECT_DOUBLE_EQ(score(pm, manual).rase, std::sqrt(12.5));

    GridField hole = pm;
    hole.set_missing(1);
    EXPECT_THROW(score(hole, manual), Error);
    (void)t;
}

TEST(ScoreProperty, AaeAtMostRaseAndPermutationInvariant) {
    std::mt19937_64 gen(6);
    std::normal_distribution<double> n(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const GridField g = testing_support::random_grid({9, 9}, static_cast<unsigned>(trial));
        auto t = make_thinning(g, {0.4, 1, static_cast<std::uint64_t>(trial)}, 0);
        GridField pred = g;
        for (auto site : t.held_out) pred.set_value(site, g.value(site) + n(gen));
        const auto e = score(pred, t);
        EXPECT_LE(e.aae, e.rase + 1e-15);
        Thinning shuffled = t;
        std::vector<std::size_t> order(t.held_out.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), gen);
        for (std::size_t k = 0; k < order.size(); ++k) {
            shuffled.held_out[k] = t.held_out[order[k]];
            shuffled.truth[k] = t.truth[order[k]];
        }
        const auto e2 = score(pred, shuffled);
        EXPECT_NEAR(e2.aae, e.aae, 1e-12);
        EXPECT_NEAR(e2.rase, e.rase, 1e-12);
    }
}

TEST(Synthetic, ZeroVarianceIsConstant) {
    SyntheticFieldSpec spec;
    spec.size = 32;
    spec.regimes = {{2.0, 0.0, 3}, {2.0, 0.0, 5}};
    const auto g = generate_synthetic_field(spec);
    EXPECT_EQ(g.missing_count(), 0u);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.value(i), 2.0);
}

TEST(Synthetic, OneRegimeQuadrantsAgree) {
    SyntheticFieldSpec spec;
    spec.size = 256;
    spec.layout = RegimeLayout::Single;
    spec.regimes = {{0.0, 1.0, 4}};
    const auto g = generate_synthetic_field(spec);
    const double a = std_dev(g, 0, 128, 0, 128), b = std_dev(g, 0, 128, 128, 256);
    const double c = std_dev(g, 128, 256, 0, 128), d = std_dev(g, 128, 256, 128, 256);
    const double lo = std::min({a, b, c, d}), hi = std::max({a, b, c, d});
    EXPECT_LE(hi / lo, 1.2);
    EXPECT_NEAR(a, 1.0, 0.2);
}

TEST(Synthetic, TwoRegimeStdRatio) {
    SyntheticFieldSpec spec;
    spec.size = 256;
    const auto g = generate_synthetic_field(spec);
    const double low = std_dev(g, 0, 256, 0, 128);
    const double high = std_dev(g, 0, 256, 128, 256);
    EXPECT_GE(high / low, 50.0);
    EXPECT_LE(high / low, 200.0);
}

TEST(Synthetic, QuadrantLayoutAndDeterminism) {
    SyntheticFieldSpec spec;
    spec.size = 64;
    spec.layout = RegimeLayout::Quadrants;
    const auto g = generate_synthetic_field(spec);
    EXPECT_LT(std_dev(g, 0, 32, 0, 32) * 20, std_dev(g, 0, 32, 32, 64));
    EXPECT_LT(std_dev(g, 32, 64, 32, 64) * 20, std_dev(g, 32, 64, 0, 32));
    const auto again = generate_synthetic_field(spec);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.value(i), again.value(i));
    spec.seed = 2;
    EXPECT_NE(generate_synthetic_field(spec).value(0), g.value(0));
    spec.regimes.resize(1);
    EXPECT_THROW(generate_synthetic_field(spec), Error);
}

class CompareMethodsTest : public ::testing::Test {
protected:
    static GridField field() {
        SyntheticFieldSpec spec;
        spec.size = 32;
        spec.seed = 3;
        return generate_synthetic_field(spec);
    }
    static MethodConfig config(Method m) {
        MethodConfig c;
        c.method = m;
        c.block_size = 8;
        c.simulation.averaging_sweeps = 20;
        c.simulation.seed = 5;
        c.idw.radius = 3.0;
        return c;
    }
};

TEST_F(CompareMethodsTest, IdenticalConfigsGiveIdenticalErrors) {
    const auto curve = testing_support::small_curve();
    const auto rep = compare_methods(field(), {0.5, 3, 1},
                                     {{"a", config(Method::Mpr)}, {"b", config(Method::Mpr)}}, curve);
    ASSERT_EQ(rep.methods.size(), 2u);
    EXPECT_EQ(rep.methods[0].errors.maae, rep.methods[1].errors.maae);
    EXPECT_EQ(rep.methods[0].errors.mrase, rep.methods[1].errors.mrase);
    EXPECT_EQ(rep.methods[1].rase_ratio, 1.0);
}

TEST_F(CompareMethodsTest, ReportInvariants) {
    const auto curve = testing_support::small_curve();
    int calls = 0;
    const auto rep = compare_methods(field(), {0.6, 4, 2},
                                     {{"idw", config(Method::Idw)},
                                      {"mpr", config(Method::Mpr)},
                                      {"bst", config(Method::SvmprBst)},
                                      {"sst", config(Method::SvmprSst)}},
                                     curve, [&](int) { ++calls; });
    EXPECT_EQ(calls, 4);
    EXPECT_EQ(rep.reference, 1u);
    EXPECT_EQ(rep.methods[1].aae_ratio, 1.0);
    double sum = 0.0;
    for (const auto& m : rep.methods) {
        EXPECT_TRUE(m.errors.failures.empty());
        ASSERT_EQ(m.errors.realizations.size(), 4u);
        for (const auto& e : m.errors.realizations) EXPECT_LE(e.aae, e.rase);
        EXPECT_LE(m.errors.maae, m.errors.mrase);
        EXPECT_NEAR(m.aae_ratio, m.errors.maae / rep.methods[1].errors.maae, 1e-12);
        sum += m.errors.total_runtime_ms;
    }
    // Bookkeeping: the per-method runtimes account for the whole run.
    EXPECT_LE(sum, rep.total_runtime_ms);
    EXPECT_GE(sum, 0.95 * rep.total_runtime_ms - 2.0);
}

TEST_F(CompareMethodsTest, FailuresAreRecordedAndRunContinues) {
    // Samples only on one checkerboard colour: no sample bonds, so MPR
    // cannot match a temperature on any realization while IDW still runs.
    GridField g(GridShape{6, 6});
    for (std::size_t i = 0; i < 36; ++i)
        if ((i / 6 + i % 6) % 2 == 0) g.set_value(i, 0.1 * static_cast<double>(i));
    const auto curve = testing_support::small_curve();
    const auto rep = compare_methods(g, {0.5, 3, 1}, {{"mpr", config(Method::Mpr)}, {"idw", config(Method::Idw)}},
                                     curve);
    EXPECT_EQ(rep.methods[0].errors.failures.size(), 3u);
    EXPECT_NE(rep.methods[0].errors.failures[0].find("sample-sample"), std::string::npos);
    EXPECT_EQ(rep.methods[1].errors.realizations.size(), 3u);
}
