#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mprfill/error.hpp"
#include "mprfill/grid.hpp"
#include "mprfill/parallel.hpp"

namespace mprfill {

enum class NoNeighborPolicy { Error, NearestFallback };

struct IdwParams {
    double power = 2.0;
    double radius = 8.0;
    NoNeighborPolicy policy = NoNeighborPolicy::NearestFallback;

    void validate() const {
        if (!(power > 0.0)) throw Error(ErrorClass::InvalidArgument, "IDW power must be > 0");
        if (!(radius > 0.0)) throw Error(ErrorClass::InvalidArgument, "IDW radius must be > 0");
    }
};

// Uniform-grid bucket index over the SAMPLE sites of a raster.
class SampleIndex {
public:
    struct Sample {
        int row;
        int col;
        double value;
    };

    SampleIndex(const GridField& grid, int cell_size) : shape_(grid.shape()), cell_(std::max(1, cell_size)) {
        cells_x_ = (shape_.width + cell_ - 1) / cell_;
        cells_y_ = (shape_.height + cell_ - 1) / cell_;
        const std::size_t nc = static_cast<std::size_t>(cells_x_) * static_cast<std::size_t>(cells_y_);
        std::vector<std::size_t> counts(nc + 1, 0);
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (grid.is_sample(i)) ++counts[cell_of(shape_.row_of(i), shape_.col_of(i)) + 1];
        for (std::size_t k = 0; k < nc; ++k) counts[k + 1] += counts[k];
        start_ = counts;
        samples_.resize(start_.back());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!grid.is_sample(i)) continue;
            const int r = shape_.row_of(i);
            const int c = shape_.col_of(i);
            samples_[counts[cell_of(r, c)]++] = {r, c, grid.value(i)};
        }
    }

    std::size_t size() const noexcept { return samples_.size(); }

    // Calls fn(sample, squared distance) for every sample within `radius`.
    template <class Fn>
    void for_each_within(int row, int col, double radius, Fn&& fn) const {
        // Squared site distances are integers; the slack keeps R = sqrt(d2)
        // inclusive after rounding.
        const double r2 = radius * radius * (1.0 + 1e-12);
        const int reach = static_cast<int>(std::ceil(radius));
        const int cy0 = std::max(0, (row - reach) / cell_);
        const int cy1 = std::min(cells_y_ - 1, (row + reach) / cell_);
        const int cx0 = std::max(0, (col - reach) / cell_);
        const int cx1 = std::min(cells_x_ - 1, (col + reach) / cell_);
        for (int cy = cy0; cy <= cy1; ++cy)
            for (int cx = cx0; cx <= cx1; ++cx) {
                const std::size_t k = static_cast<std::size_t>(cy) * cells_x_ + cx;
                for (std::size_t s = start_[k]; s < start_[k + 1]; ++s) {
                    const auto& smp = samples_[s];
                    const double dy = smp.row - row;
                    const double dx = smp.col - col;
                    const double d2 = dx * dx + dy * dy;
                    if (d2 <= r2) fn(smp, d2);
                }
            }
    }

    // Nearest sample by Euclidean distance (ties: lowest row-major site),
    // found by scanning rings of cells outward.
    std::pair<Sample, double> nearest(int row, int col) const {
        if (samples_.empty()) throw Error(ErrorClass::NoSamples, "no samples indexed");
        const int cr = row / cell_;
        const int cc = col / cell_;
        double best_d2 = std::numeric_limits<double>::infinity();
        const Sample* best = nullptr;
        const int max_ring = std::max(cells_x_, cells_y_);
        for (int ring = 0; ring <= max_ring; ++ring) {
            for (int cy = cr - ring; cy <= cr + ring; ++cy) {
                if (cy < 0 || cy >= cells_y_) continue;
                for (int cx = cc - ring; cx <= cc + ring; ++cx) {
                    if (cx < 0 || cx >= cells_x_) continue;
                    if (std::max(std::abs(cy - cr), std::abs(cx - cc)) != ring) continue;
                    const std::size_t k = static_cast<std::size_t>(cy) * cells_x_ + cx;
                    for (std::size_t s = start_[k]; s < start_[k + 1]; ++s) {
                        const double dy = samples_[s].row - row;
                        const double dx = samples_[s].col - col;
                        const double d2 = dx * dx + dy * dy;
                        const auto& c = samples_[s];
                        const bool tie_wins =
                            d2 == best_d2 && std::pair{c.row, c.col} < std::pair{best->row, best->col};
                        if (d2 < best_d2 || tie_wins) {
                            best_d2 = d2;
                            best = &samples_[s];
                        }
                    }
                }
            }
            // Any cell outside this ring is at least ring * cell_ sites away.
            if (best) {
                const double guaranteed = static_cast<double>(ring) * cell_;
                if (best_d2 < guaranteed * guaranteed) break;
            }
        }
        return {*best, std::sqrt(best_d2)};
    }

private:
    std::size_t cell_of(int r, int c) const noexcept {
        return static_cast<std::size_t>(r / cell_) * static_cast<std::size_t>(cells_x_) +
               static_cast<std::size_t>(c / cell_);
    }

    GridShape shape_;
    int cell_;
    int cells_x_ = 0;
    int cells_y_ = 0;
    std::vector<std::size_t> start_;
    std::vector<Sample> samples_;
};

struct IdwResult {
    GridField filled;
    std::size_t fallback_count = 0;
};

inline IdwResult idw_predict(const GridField& grid, const IdwParams& params, Threads threads = {1}) {
    params.validate();
    if (grid.sample_count() == 0) throw Error(ErrorClass::NoSamples, "IDW needs at least one sample");
    const int cell = std::clamp(static_cast<int>(std::ceil(params.radius)), 4, 64);
    const SampleIndex index(grid, cell);
    const GridShape s = grid.shape();

    std::vector<std::size_t> targets;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid.is_missing(i)) targets.push_back(i);
    std::vector<double> predictions(targets.size());
    std::vector<unsigned char> fell_back(targets.size(), 0);

    parallel_for(targets.size(), threads, [&](std::size_t k) {
        const int r = s.row_of(targets[k]);
        const int c = s.col_of(targets[k]);
        double num = 0.0;
        double den = 0.0;
        index.for_each_within(r, c, params.radius, [&](const SampleIndex::Sample& smp, double d2) {
            const double w = std::pow(d2, -0.5 * params.power);
            num += w * smp.value;
            den += w;
        });
        if (den > 0.0) {
            predictions[k] = num / den;
        } else {
            fell_back[k] = 1;
            if (params.policy == NoNeighborPolicy::NearestFallback) predictions[k] = index.nearest(r, c).first.value;
        }
    });

    IdwResult out{grid, 0};
    std::string offending;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        if (fell_back[k]) {
            ++out.fallback_count;
            if (params.policy == NoNeighborPolicy::Error && out.fallback_count <= 10)
                offending += " (" + std::to_string(s.row_of(targets[k])) + "," +
                             std::to_string(s.col_of(targets[k])) + ")";
        }
        out.filled.set_value(targets[k], predictions[k]);
    }
    if (params.policy == NoNeighborPolicy::Error && out.fallback_count > 0)
        throw Error(ErrorClass::NoNeighbors, std::to_string(out.fallback_count) +
                                                 " prediction sites have no sample within R:" + offending +
                                                 (out.fallback_count > 10 ? " ..." : ""));
    return out;
}

// Largest nearest-sample distance over MISSING sites; 0 if nothing is missing.
inline double min_full_coverage_radius(const GridField& grid, Threads threads = {1}) {
    if (grid.sample_count() == 0) throw Error(ErrorClass::NoSamples, "coverage radius needs at least one sample");
    const SampleIndex index(grid, 8);
    const GridShape s = grid.shape();
    const auto rows = static_cast<std::size_t>(s.height);
    std::vector<double> row_max(rows, 0.0);
    parallel_for(rows, threads, [&](std::size_t rr) {
        const int r = static_cast<int>(rr);
        for (int c = 0; c < s.width; ++c)
            if (grid.is_missing(s.index(r, c))) row_max[rr] = std::max(row_max[rr], index.nearest(r, c).second);
    });
    return *std::max_element(row_max.begin(), row_max.end());
}

} // namespace mprfill
