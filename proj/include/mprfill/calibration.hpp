#pragma once

#include <cstdint>
#include <vector>

#include "mprfill/error.hpp"
#include "mprfill/mpr_model.hpp"
#include "mprfill/philox.hpp"
#include "mprfill/simulation.hpp"

namespace mprfill {

struct CalibrationOptions {
    int reference_size = 128;
    int burn_in_sweeps = 300;
    int averaging_sweeps = 300;
    std::uint64_t seed = 20220101;
    Threads threads{1};
};

inline std::vector<double> default_calibration_temperatures() {
    return log_spaced_temperatures(1e-4, 10.0, 48);
}

struct CalibrationBuild {
    CalibrationCurve curve;
    std::vector<double> raw_energies;
    std::vector<double> standard_errors;
    // Knots whose raw energy dropped below a predecessor by more than three
    // combined standard errors.
    std::size_t significant_violations = 0;
};

// Unconditional equilibrium energies e(T) on a reference grid, started from the
// aligned ground state, then made non-decreasing by isotonic regression.
inline CalibrationBuild build_calibration_curve(const MprParams& params, const std::vector<double>& t_grid,
                                                const CalibrationOptions& options) {
    params.validate();
    if (t_grid.size() < 2) throw Error(ErrorClass::InvalidArgument, "t_grid needs at least two temperatures");
    if (!(t_grid.front() >= 0.0)) throw Error(ErrorClass::InvalidArgument, "t_grid must start at T >= 0");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (!(t_grid[k] > t_grid[k - 1]))
            throw Error(ErrorClass::InvalidArgument, "t_grid must be strictly increasing");
    if (options.reference_size < 2 || options.averaging_sweeps < 1 || options.burn_in_sweeps < 0)
        throw Error(ErrorClass::InvalidArgument, "invalid calibration options");

    CalibrationBuild out;
    const GridShape shape{options.reference_size, options.reference_size};
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const auto run = run_unconditional(shape, t_grid[k], params, options.burn_in_sweeps,
                                           options.averaging_sweeps, mix_seed(options.seed, k),
                                           UnconditionalStart::Ordered, options.threads);
        out.raw_energies.push_back(run.mean_energy);
        out.standard_errors.push_back(run.standard_error);
    }
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        const double drop = out.raw_energies[k - 1] - out.raw_energies[k];
        const double se = std::hypot(out.standard_errors[k - 1], out.standard_errors[k]);
        if (drop > 3.0 * se) ++out.significant_violations;
    }

    const auto fitted = isotonic_non_decreasing(out.raw_energies);
    std::vector<CalibrationPoint> points;
    CalibrationMetadata meta{params.modification, params.coupling, options.reference_size,
                             options.burn_in_sweeps, options.averaging_sweeps, options.seed, 0};
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        points.push_back({t_grid[k], fitted[k]});
        meta.isotonic_adjusted += (fitted[k] != out.raw_energies[k]);
    }
    out.curve = CalibrationCurve(std::move(points), meta);
    return out;
}

} // namespace mprfill
