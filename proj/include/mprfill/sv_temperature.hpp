#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mprfill/error.hpp"
#include "mprfill/grid.hpp"
#include "mprfill/mpr_model.hpp"
#include "mprfill/parallel.hpp"
#include "mprfill/temperature_field.hpp"

namespace mprfill {

struct BlockTemperature {
    BondEnergyStats energy;
    double temperature = 0.0;
    bool clamped = false;
    bool fallback = false;  // set iff the block has no sample-sample bond
};

struct BlockTemperatureStats {
    std::vector<BlockTemperature> blocks;
    bool global_fallback = false;  // every block was empty
    std::vector<std::string> warnings;
};

// Per-block e_s over FIXED-FIXED bonds with both endpoints inside the block.
inline BlockTemperatureStats block_sample_energies(const AngleField& f, const BlockDecomposition& blocks,
                                                   const MprParams& params, Threads threads = {1}) {
    if (blocks.shape() != f.shape) throw Error(ErrorClass::InvalidArgument, "decomposition does not cover grid");
    const std::size_t nb = blocks.block_count();
    const GridShape s = f.shape;
    const int lb = blocks.block_size();
    const double q = params.modification;

    BlockTemperatureStats out;
    out.blocks.resize(nb);
    parallel_for(nb, threads, [&](std::size_t b) {
        const int r0 = static_cast<int>(b / blocks.blocks_x()) * lb;
        const int c0 = static_cast<int>(b % blocks.blocks_x()) * lb;
        const int r1 = r0 + blocks.block_height(b);
        const int c1 = c0 + blocks.block_width(b);
        std::vector<double> row_sums;
        std::size_t n = 0;
        for (int r = r0; r < r1; ++r) {
            double acc = 0.0;
            for (int c = c0; c < c1; ++c) {
                const std::size_t i = s.index(r, c);
                if (!f.is_fixed(i)) continue;
                if (c + 1 < c1 && f.is_fixed(i + 1)) {
                    acc += std::cos(q * (f.angles[i] - f.angles[i + 1]));
                    ++n;
                }
                const std::size_t down = i + static_cast<std::size_t>(s.width);
                if (r + 1 < r1 && f.is_fixed(down)) {
                    acc += std::cos(q * (f.angles[i] - f.angles[down]));
                    ++n;
                }
            }
            row_sums.push_back(acc);
        }
        auto& blk = out.blocks[b];
        blk.energy.bond_count = n;
        blk.energy.energy = n ? -params.coupling * pairwise_sum(row_sums) / static_cast<double>(n) : 0.0;
        blk.fallback = (n == 0);
    });
    return out;
}

// Lower median for even counts.
inline double lower_median(std::vector<double> xs) {
    if (xs.empty()) throw Error(ErrorClass::InvalidArgument, "median of an empty set");
    const auto mid = xs.begin() + static_cast<std::ptrdiff_t>((xs.size() - 1) / 2);
    std::nth_element(xs.begin(), mid, xs.end());
    return *mid;
}

// Matches each block energy against the curve; empty blocks take the median
// of the available block temperatures. If every block is empty the global
// sample energy decides a uniform temperature.
inline BlockTemperatureStats assign_block_temperatures(BlockTemperatureStats stats, const CalibrationCurve& curve,
                                                       std::optional<BondEnergyStats> global = std::nullopt) {
    std::vector<double> available;
    for (auto& b : stats.blocks) {
        b.fallback = !b.energy.has_bonds();
        if (b.fallback) continue;
        const auto est = estimate_temperature(b.energy.energy, curve);
        b.temperature = est.temperature;
        b.clamped = est.clamped;
        available.push_back(b.temperature);
    }
    if (available.empty()) {
        if (!global || !global->has_bonds())
            throw Error(ErrorClass::NoSampleBonds, "no sample-sample bonds anywhere in the grid");
        const auto est = estimate_temperature(global->energy, curve);
        for (auto& b : stats.blocks) {
            b.temperature = est.temperature;
            b.clamped = est.clamped;
        }
        stats.global_fallback = true;
        stats.warnings.push_back("all blocks lack sample bonds: uniform global temperature used");
        return stats;
    }
    const double median = lower_median(available);
    for (auto& b : stats.blocks)
        if (b.fallback) b.temperature = median;
    return stats;
}

inline TemperatureField expand_to_sites(const BlockTemperatureStats& stats, const BlockDecomposition& blocks) {
    if (stats.blocks.size() != blocks.block_count())
        throw Error(ErrorClass::InvalidArgument, "block statistics do not match decomposition");
    TemperatureField out;
    out.shape = blocks.shape();
    out.values.resize(out.shape.size());
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = stats.blocks[blocks.block_of(i)].temperature;
    out.provenance = {TemperatureKind::BlockSpecific, blocks.block_size(), 0.0, 0};
    return out;
}

// n_s passes of disc averaging: each site becomes the mean over sites within
// Euclidean distance r_s (center included, disc clipped at the edges).
inline TemperatureField smooth_temperatures(const TemperatureField& field, double radius, int passes,
                                            Threads threads = {1}) {
    if (!(radius >= 1.0)) throw Error(ErrorClass::InvalidArgument, "smoothing radius must be >= 1");
    if (passes < 0) throw Error(ErrorClass::InvalidArgument, "smoothing passes must be >= 0");
    field.validate();
    const GridShape s = field.shape;
    const int reach = static_cast<int>(std::floor(radius));
    std::vector<int> half_width(static_cast<std::size_t>(reach) + 1);
    for (int dy = 0; dy <= reach; ++dy)
        half_width[static_cast<std::size_t>(dy)] =
            static_cast<int>(std::floor(std::sqrt(radius * radius - static_cast<double>(dy) * dy)));

    TemperatureField out = field;
    out.provenance.kind = TemperatureKind::SiteSpecific;
    out.provenance.smoothing_radius = radius;
    out.provenance.smoothing_passes = passes;

    const auto w = static_cast<std::size_t>(s.width);
    std::vector<double> prefix(static_cast<std::size_t>(s.height) * (w + 1));
    std::vector<double> next(s.size());
    for (int pass = 0; pass < passes; ++pass) {
        const auto [lo_it, hi_it] = std::minmax_element(out.values.begin(), out.values.end());
        const double lo = *lo_it;
        const double hi = *hi_it;
        for (int r = 0; r < s.height; ++r) {
            double* p = prefix.data() + static_cast<std::size_t>(r) * (w + 1);
            p[0] = 0.0;
            for (int c = 0; c < s.width; ++c) p[c + 1] = p[c] + out.values[s.index(r, c)];
        }
        parallel_for(static_cast<std::size_t>(s.height), threads, [&](std::size_t rr) {
            const int r = static_cast<int>(rr);
            for (int c = 0; c < s.width; ++c) {
                double sum = 0.0;
                std::size_t count = 0;
                for (int dy = -reach; dy <= reach; ++dy) {
                    const int y = r + dy;
                    if (y < 0 || y >= s.height) continue;
                    const int hw = half_width[static_cast<std::size_t>(std::abs(dy))];
                    const int x0 = std::max(0, c - hw);
                    const int x1 = std::min(s.width - 1, c + hw);
                    const double* p = prefix.data() + static_cast<std::size_t>(y) * (w + 1);
                    sum += p[x1 + 1] - p[x0];
                    count += static_cast<std::size_t>(x1 - x0 + 1);
                }
                // Prefix-sum differences can round just outside the hull.
                next[s.index(r, c)] = std::clamp(sum / static_cast<double>(count), lo, hi);
            }
        });
        out.values.swap(next);
    }
    return out;
}

} // namespace mprfill
