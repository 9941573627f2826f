#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mprfill/error.hpp"
#include "mprfill/grid.hpp"
#include "mprfill/parallel.hpp"

namespace mprfill {

// Coupling J > 0 and modification 0 < q <= 1/2 of the modified planar rotator.
struct MprParams {
    double coupling = 1.0;
    double modification = 0.5;

    void validate() const {
        if (!(coupling > 0.0)) throw Error(ErrorClass::InvalidArgument, "coupling J must be > 0");
        if (!(modification > 0.0 && modification <= 0.5))
            throw Error(ErrorClass::InvalidArgument, "modification q must be in (0, 1/2]");
    }
};

inline double bond_energy(double phi_i, double phi_j, const MprParams& params) noexcept {
    return -params.coupling * std::cos(params.modification * (phi_i - phi_j));
}

// Specific energy over a set of bonds; undefined when bond_count == 0.
struct BondEnergyStats {
    double energy = 0.0;
    std::size_t bond_count = 0;

    bool has_bonds() const noexcept { return bond_count > 0; }
};

namespace detail {

// Sums cos(q*dphi) over the bonds whose owning site lies in `row`; a bond is
// owned by its upper/left endpoint so each unordered pair is visited once.
template <class BondFilter>
inline void row_bond_sums(const AngleField& f, double q, int row, BondFilter&& keep, double& sum,
                          std::size_t& count) noexcept {
    const GridShape s = f.shape;
    double acc = 0.0;
    std::size_t n = 0;
    for (int c = 0; c < s.width; ++c) {
        const std::size_t i = s.index(row, c);
        if (c + 1 < s.width) {
            const std::size_t j = i + 1;
            if (keep(i, j)) {
                acc += std::cos(q * (f.angles[i] - f.angles[j]));
                ++n;
            }
        }
        if (row + 1 < s.height) {
            const std::size_t j = i + static_cast<std::size_t>(s.width);
            if (keep(i, j)) {
                acc += std::cos(q * (f.angles[i] - f.angles[j]));
                ++n;
            }
        }
    }
    sum = acc;
    count = n;
}

template <class BondFilter>
inline BondEnergyStats specific_energy(const AngleField& f, const MprParams& params, BondFilter&& keep,
                                       Threads threads) {
    const auto rows = static_cast<std::size_t>(f.shape.height);
    std::vector<double> sums(rows);
    std::vector<std::size_t> counts(rows);
    parallel_for(rows, threads, [&](std::size_t r) {
        row_bond_sums(f, params.modification, static_cast<int>(r), keep, sums[r], counts[r]);
    });
    std::size_t n = 0;
    for (auto c : counts) n += c;
    if (n == 0) return {0.0, 0};
    return {-params.coupling * pairwise_sum(sums) / static_cast<double>(n), n};
}

} // namespace detail

// e_s over unordered FIXED-FIXED nearest-neighbor pairs.
inline BondEnergyStats sample_specific_energy(const AngleField& f, const MprParams& params,
                                              Threads threads = {1}) {
    return detail::specific_energy(
        f, params, [&](std::size_t i, std::size_t j) { return f.is_fixed(i) && f.is_fixed(j); }, threads);
}

// Specific energy over every bond of the grid.
inline double grid_specific_energy(const AngleField& f, const MprParams& params, Threads threads = {1}) {
    return detail::specific_energy(f, params, [](std::size_t, std::size_t) { return true; }, threads).energy;
}

// Pool-adjacent-violators fit of a non-decreasing sequence (unit weights).
inline std::vector<double> isotonic_non_decreasing(const std::vector<double>& y) {
    struct Pool {
        double sum;
        std::size_t n;
        double mean() const { return sum / static_cast<double>(n); }
    };
    std::vector<Pool> pools;
    pools.reserve(y.size());
    for (double v : y) {
        pools.push_back({v, 1});
        while (pools.size() > 1 && pools[pools.size() - 2].mean() > pools.back().mean()) {
            const Pool last = pools.back();
            pools.pop_back();
            pools.back().sum += last.sum;
            pools.back().n += last.n;
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (const auto& p : pools) out.insert(out.end(), p.n, p.mean());
    return out;
}

struct CalibrationPoint {
    double temperature;
    double energy;
};

struct CalibrationMetadata {
    double modification = 0.5;
    double coupling = 1.0;
    int reference_size = 128;
    int burn_in_sweeps = 0;
    int averaging_sweeps = 0;
    std::uint64_t seed = 0;
    std::size_t isotonic_adjusted = 0;  // number of knots changed by the monotone fit
};

// Monotone table T -> e(T), inverted for temperature inference.
class CalibrationCurve {
public:
    CalibrationCurve() = default;

    CalibrationCurve(std::vector<CalibrationPoint> points, CalibrationMetadata meta)
        : points_(std::move(points)), meta_(meta) {
        validate();
    }

    const std::vector<CalibrationPoint>& points() const noexcept { return points_; }
    const CalibrationMetadata& metadata() const noexcept { return meta_; }
    double t_min() const noexcept { return points_.front().temperature; }
    double t_max() const noexcept { return points_.back().temperature; }

    // Piecewise-linear e(T), clamped outside the table.
    double energy_at(double t) const noexcept {
        if (t <= points_.front().temperature) return points_.front().energy;
        if (t >= points_.back().temperature) return points_.back().energy;
        const auto it = std::lower_bound(points_.begin(), points_.end(), t,
                                         [](const CalibrationPoint& p, double v) { return p.temperature < v; });
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double w = (t - lo.temperature) / (hi.temperature - lo.temperature);
        return lo.energy + w * (hi.energy - lo.energy);
    }

    friend bool operator==(const CalibrationCurve& a, const CalibrationCurve& b) noexcept {
        if (a.points_.size() != b.points_.size()) return false;
        for (std::size_t i = 0; i < a.points_.size(); ++i)
            if (a.points_[i].temperature != b.points_[i].temperature ||
                a.points_[i].energy != b.points_[i].energy)
                return false;
        const auto& m = a.meta_;
        const auto& n = b.meta_;
        return m.modification == n.modification && m.coupling == n.coupling &&
               m.reference_size == n.reference_size && m.burn_in_sweeps == n.burn_in_sweeps &&
               m.averaging_sweeps == n.averaging_sweeps && m.seed == n.seed &&
               m.isotonic_adjusted == n.isotonic_adjusted;
    }

private:
    void validate() const {
        if (points_.size() < 2)
            throw Error(ErrorClass::InvalidArgument, "calibration curve needs at least two points");
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (!(points_[i].temperature >= 0.0) || !std::isfinite(points_[i].energy))
                throw Error(ErrorClass::InvalidArgument, "calibration point " + std::to_string(i) + " invalid");
            if (i > 0 && !(points_[i].temperature > points_[i - 1].temperature))
                throw Error(ErrorClass::InvalidArgument, "calibration temperatures must increase strictly");
            if (i > 0 && points_[i].energy < points_[i - 1].energy)
                throw Error(ErrorClass::InvalidArgument, "calibration energies must be non-decreasing");
        }
    }

    std::vector<CalibrationPoint> points_;
    CalibrationMetadata meta_;
};

struct TemperatureEstimate {
    double temperature;
    bool clamped;
};

// Inverse piecewise-linear lookup; energies outside the table clamp to the
// end temperatures. On a flat run of equal energies the lowest T is returned.
inline TemperatureEstimate estimate_temperature(double sample_energy, const CalibrationCurve& curve) noexcept {
    const auto& pts = curve.points();
    if (sample_energy < pts.front().energy) return {pts.front().temperature, true};
    if (sample_energy > pts.back().energy) return {pts.back().temperature, true};
    const auto it = std::lower_bound(pts.begin(), pts.end(), sample_energy,
                                     [](const CalibrationPoint& p, double e) { return p.energy < e; });
    if (it == pts.begin()) return {it->temperature, false};
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (sample_energy - lo.energy) / (hi.energy - lo.energy);
    return {lo.temperature + w * (hi.temperature - lo.temperature), false};
}

// Default calibration grid: n log-spaced temperatures in [lo, hi].
inline std::vector<double> log_spaced_temperatures(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi > lo) || n < 2)
        throw Error(ErrorClass::InvalidArgument, "log spacing needs 0 < lo < hi and n >= 2");
    std::vector<double> out(static_cast<std::size_t>(n));
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

} // namespace mprfill
