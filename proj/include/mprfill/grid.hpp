#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "mprfill/error.hpp"

namespace mprfill {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct GridShape {
    int width = 0;
    int height = 0;

    constexpr std::size_t size() const noexcept {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    constexpr bool contains(int row, int col) const noexcept {
        return row >= 0 && row < height && col >= 0 && col < width;
    }
    constexpr std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(col);
    }
    constexpr int row_of(std::size_t site) const noexcept { return static_cast<int>(site / width); }
    constexpr int col_of(std::size_t site) const noexcept { return static_cast<int>(site % width); }

    // Open-boundary bond count: horizontal plus vertical nearest-neighbor pairs.
    constexpr std::size_t bond_count() const noexcept {
        if (width <= 0 || height <= 0) return 0;
        return static_cast<std::size_t>(width - 1) * height +
               static_cast<std::size_t>(height - 1) * width;
    }

    friend constexpr bool operator==(const GridShape&, const GridShape&) = default;
};

enum class SiteState : std::uint8_t { Sample, Missing };

// Rectangular raster with an explicit sample mask. Values at MISSING sites
// are not part of the data and must not be read.
class GridField {
public:
    GridField() = default;

    explicit GridField(GridShape shape)
        : shape_(shape),
          values_(shape.size(), std::numeric_limits<double>::quiet_NaN()),
          mask_(shape.size(), SiteState::Missing) {
        validate_shape(shape);
    }

    GridField(GridShape shape, std::vector<double> values, std::vector<SiteState> mask)
        : shape_(shape), values_(std::move(values)), mask_(std::move(mask)) {
        validate_shape(shape);
        if (values_.size() != shape.size() || mask_.size() != shape.size())
            throw Error(ErrorClass::InvalidArgument, "grid storage does not match shape");
        for (std::size_t i = 0; i < mask_.size(); ++i)
            if (mask_[i] == SiteState::Missing) values_[i] = std::numeric_limits<double>::quiet_NaN();
    }

    static GridField fully_sampled(GridShape shape, std::vector<double> values) {
        std::vector<SiteState> mask(shape.size(), SiteState::Sample);
        return GridField(shape, std::move(values), std::move(mask));
    }

    GridShape shape() const noexcept { return shape_; }
    int width() const noexcept { return shape_.width; }
    int height() const noexcept { return shape_.height; }
    std::size_t size() const noexcept { return values_.size(); }

    bool is_sample(std::size_t site) const noexcept { return mask_[site] == SiteState::Sample; }
    bool is_missing(std::size_t site) const noexcept { return mask_[site] == SiteState::Missing; }

    double value(std::size_t site) const noexcept {
        assert(site < values_.size() && "site out of range");
        assert(mask_[site] == SiteState::Sample && "read of a MISSING site");
        return values_[site];
    }
    double value(int row, int col) const noexcept { return value(shape_.index(row, col)); }

    void set_value(std::size_t site, double v) noexcept {
        values_[site] = v;
        mask_[site] = SiteState::Sample;
    }
    void set_missing(std::size_t site) noexcept {
        values_[site] = std::numeric_limits<double>::quiet_NaN();
        mask_[site] = SiteState::Missing;
    }

    std::span<const SiteState> mask() const noexcept { return mask_; }

    std::size_t sample_count() const noexcept {
        std::size_t n = 0;
        for (auto s : mask_) n += (s == SiteState::Sample);
        return n;
    }
    std::size_t missing_count() const noexcept { return size() - sample_count(); }

private:
    static void validate_shape(GridShape shape) {
        if (shape.width <= 0 || shape.height <= 0)
            throw Error(ErrorClass::InvalidArgument, "grid dimensions must be positive");
    }

    GridShape shape_{};
    std::vector<double> values_;
    std::vector<SiteState> mask_;
};

// Up to four nearest neighbors; open boundaries.
struct Neighbors {
    std::array<std::size_t, 4> sites{};
    int count = 0;

    const std::size_t* begin() const noexcept { return sites.data(); }
    const std::size_t* end() const noexcept { return sites.data() + count; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(count); }
};

inline Neighbors neighbors(GridShape shape, int row, int col) {
    if (!shape.contains(row, col))
        throw Error(ErrorClass::IndexOutOfRange,
                    "site (" + std::to_string(row) + "," + std::to_string(col) + ") outside grid");
    Neighbors out;
    if (row > 0) out.sites[out.count++] = shape.index(row - 1, col);
    if (row + 1 < shape.height) out.sites[out.count++] = shape.index(row + 1, col);
    if (col > 0) out.sites[out.count++] = shape.index(row, col - 1);
    if (col + 1 < shape.width) out.sites[out.count++] = shape.index(row, col + 1);
    return out;
}

inline Neighbors neighbors(GridShape shape, std::size_t site) {
    if (site >= shape.size())
        throw Error(ErrorClass::IndexOutOfRange, "site index " + std::to_string(site) + " outside grid");
    return neighbors(shape, shape.row_of(site), shape.col_of(site));
}

enum class Color : std::uint8_t { A = 0, B = 1 };

constexpr Color checkerboard_parity(int row, int col) noexcept {
    return ((row + col) % 2 == 0) ? Color::A : Color::B;
}

struct TransformParams {
    double z_min = 0.0;
    double z_max = 1.0;

    bool degenerate() const noexcept { return !(z_max > z_min); }
};

// Range of the SAMPLE values only.
inline TransformParams transform_params_from_samples(const GridField& grid) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.is_sample(i)) continue;
        lo = std::min(lo, grid.value(i));
        hi = std::max(hi, grid.value(i));
    }
    if (lo > hi) throw Error(ErrorClass::NoSamples, "grid has no SAMPLE sites");
    return {lo, hi};
}

enum class SpinState : std::uint8_t { Fixed, Free };

struct AngleField {
    GridShape shape{};
    std::vector<double> angles;      // radians in [0, 2pi]
    std::vector<SpinState> state;    // FIXED at samples, FREE at prediction sites

    bool is_fixed(std::size_t site) const noexcept { return state[site] == SpinState::Fixed; }
    std::size_t free_count() const noexcept {
        std::size_t n = 0;
        for (auto s : state) n += (s == SpinState::Free);
        return n;
    }
};

inline AngleField to_angles(const GridField& grid, const TransformParams& params) {
    if (params.degenerate())
        throw Error(ErrorClass::DegenerateRange, "transform range is empty (z_max <= z_min)");
    AngleField out;
    out.shape = grid.shape();
    out.angles.assign(grid.size(), 0.0);
    out.state.assign(grid.size(), SpinState::Free);
    const double scale = kTwoPi / (params.z_max - params.z_min);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.is_sample(i)) continue;
        out.state[i] = SpinState::Fixed;
        out.angles[i] = std::clamp((grid.value(i) - params.z_min) * scale, 0.0, kTwoPi);
    }
    return out;
}

inline double angle_to_value(double phi, const TransformParams& params) noexcept {
    return params.z_min + (params.z_max - params.z_min) * (phi / kTwoPi);
}

// Every site of the result is SAMPLE.
inline GridField from_angles(const AngleField& angles, const TransformParams& params) {
    std::vector<double> values(angles.angles.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = angle_to_value(angles.angles[i], params);
    return GridField::fully_sampled(angles.shape, std::move(values));
}

// Row-major l_b x l_b tiling; edge blocks are truncated when l_b does not
// divide the grid.
class BlockDecomposition {
public:
    BlockDecomposition(GridShape shape, int block_size) : shape_(shape), block_size_(block_size) {
        if (block_size < 2) throw Error(ErrorClass::InvalidArgument, "block size must be >= 2");
        blocks_x_ = (shape.width + block_size - 1) / block_size;
        blocks_y_ = (shape.height + block_size - 1) / block_size;
        block_of_.resize(shape.size());
        for (int r = 0; r < shape.height; ++r)
            for (int c = 0; c < shape.width; ++c)
                block_of_[shape.index(r, c)] =
                    static_cast<std::uint32_t>((r / block_size) * blocks_x_ + c / block_size);
    }

    GridShape shape() const noexcept { return shape_; }
    int block_size() const noexcept { return block_size_; }
    int blocks_x() const noexcept { return blocks_x_; }
    int blocks_y() const noexcept { return blocks_y_; }
    std::size_t block_count() const noexcept {
        return static_cast<std::size_t>(blocks_x_) * static_cast<std::size_t>(blocks_y_);
    }
    std::size_t block_of(std::size_t site) const noexcept { return block_of_[site]; }

    int block_width(std::size_t block) const noexcept {
        const int bx = static_cast<int>(block % blocks_x_);
        return std::min(block_size_, shape_.width - bx * block_size_);
    }
    int block_height(std::size_t block) const noexcept {
        const int by = static_cast<int>(block / blocks_x_);
        return std::min(block_size_, shape_.height - by * block_size_);
    }

private:
    GridShape shape_;
    int block_size_;
    int blocks_x_ = 0;
    int blocks_y_ = 0;
    std::vector<std::uint32_t> block_of_;
};

inline BlockDecomposition make_blocks(GridShape shape, int block_size) {
    return BlockDecomposition(shape, block_size);
}

} // namespace mprfill
