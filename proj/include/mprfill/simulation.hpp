#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mprfill/error.hpp"
#include "mprfill/grid.hpp"
#include "mprfill/mpr_model.hpp"
#include "mprfill/parallel.hpp"
#include "mprfill/philox.hpp"
#include "mprfill/temperature_field.hpp"

namespace mprfill {

enum class InitStrategy { Random, BlockMean };

struct SimulationConfig {
    int n_fit = 20;
    int n_f = 5;
    int max_sweeps = 500;
    int averaging_sweeps = 100;
    std::uint64_t seed = 1;
    InitStrategy init = InitStrategy::Random;
    int init_block_size = 32;               // tiling used by BLOCK_MEAN
    std::optional<double> slope_tolerance;  // default: 2 * residual std / n_fit
    Threads threads{1};

    void validate() const {
        if (n_fit < 2) throw Error(ErrorClass::InvalidArgument, "n_fit must be >= 2");
        if (n_f < 1) throw Error(ErrorClass::InvalidArgument, "n_f must be >= 1");
        if (averaging_sweeps < 1) throw Error(ErrorClass::InvalidArgument, "averaging sweeps must be >= 1");
        if (max_sweeps < n_fit + n_f)
            throw Error(ErrorClass::InvalidArgument, "max_sweeps must be >= n_fit + n_f");
    }
};

// Grid specific energy after each completed sweep.
struct EnergyTrace {
    std::vector<double> energies;

    void push(double e) { energies.push_back(e); }
    std::size_t size() const noexcept { return energies.size(); }
    double back() const noexcept { return energies.back(); }
};

// Least-squares slope test over the last n_fit energies, evaluated only at
// sweep counts n_fit + n_f + k * n_f.
inline bool detect_equilibrium(const EnergyTrace& trace, const SimulationConfig& config) noexcept {
    const auto n = trace.size();
    const auto first_check = static_cast<std::size_t>(config.n_fit + config.n_f);
    if (n < first_check) return false;
    if ((n - first_check) % static_cast<std::size_t>(config.n_f) != 0) return false;

    const auto m = static_cast<std::size_t>(config.n_fit);
    const double* y = trace.energies.data() + (n - m);
    const double x_mean = 0.5 * static_cast<double>(m - 1);
    double y_mean = 0.0;
    for (std::size_t k = 0; k < m; ++k) y_mean += y[k];
    y_mean /= static_cast<double>(m);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double dx = static_cast<double>(k) - x_mean;
        sxy += dx * (y[k] - y_mean);
        sxx += dx * dx;
    }
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double r = y[k] - (y_mean + slope * (static_cast<double>(k) - x_mean));
        rss += r * r;
    }
    const double tolerance =
        config.slope_tolerance.value_or(2.0 * std::sqrt(rss / static_cast<double>(m)) / static_cast<double>(m));
    return slope >= 0.0 || std::abs(slope) <= tolerance;
}

namespace detail {
inline constexpr std::uint64_t kInitSalt = 0x1;
inline constexpr std::uint64_t kSweepSalt = 0x2;
} // namespace detail

// FREE angles: i.i.d. uniform (RANDOM) or the mean FIXED angle of the block
// (BLOCK_MEAN; sample-free blocks take the global FIXED mean).
inline AngleField initialize_angles(AngleField angles, const BlockDecomposition& blocks, InitStrategy strategy,
                                    std::uint64_t seed) {
    const std::size_t n = angles.angles.size();
    std::size_t fixed = 0;
    for (std::size_t i = 0; i < n; ++i) fixed += angles.is_fixed(i);
    if (fixed == 0) throw Error(ErrorClass::NoSamples, "cannot initialize: no FIXED sites");
    if (fixed == n) return angles;

    if (strategy == InitStrategy::Random) {
        const CounterRng rng(mix_seed(seed, detail::kInitSalt));
        for (std::size_t i = 0; i < n; ++i)
            if (!angles.is_fixed(i)) angles.angles[i] = kTwoPi * rng.uniforms(0, i).first;
        return angles;
    }

    std::vector<double> sum(blocks.block_count(), 0.0);
    std::vector<std::size_t> count(blocks.block_count(), 0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!angles.is_fixed(i)) continue;
        sum[blocks.block_of(i)] += angles.angles[i];
        ++count[blocks.block_of(i)];
        total += angles.angles[i];
    }
    const double global_mean = total / static_cast<double>(fixed);
    for (std::size_t i = 0; i < n; ++i) {
        if (angles.is_fixed(i)) continue;
        const auto b = blocks.block_of(i);
        angles.angles[i] = count[b] ? sum[b] / static_cast<double>(count[b]) : global_mean;
    }
    return angles;
}

struct SweepStats {
    std::size_t attempted = 0;
    std::size_t accepted = 0;

    // Empty update sets count as fully accepted.
    double acceptance_ratio() const noexcept {
        return attempted == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(attempted);
    }
};

// Hook for instrumenting sweeps; the default does nothing.
struct NullSweepObserver {
    void begin_phase(Color) noexcept {}
    void on_read(std::size_t /*site*/, std::size_t /*neighbor*/) noexcept {}
    void on_write(std::size_t /*site*/) noexcept {}
};

// One checkerboard sweep: every FREE color-A site, then every FREE color-B
// site. Proposals are uniform in [0, 2pi]; randomness is keyed by
// (seed, sweep_index, site) so the outcome does not depend on threads.
// Observers must be thread-safe when threads > 1.
template <class Observer = NullSweepObserver>
SweepStats metropolis_sweep(AngleField& f, const TemperatureField& temps, const MprParams& params,
                            std::uint64_t sweep_index, std::uint64_t seed, Threads threads = {1},
                            Observer&& observer = {}) {
    const GridShape s = f.shape;
    if (temps.shape != s) throw Error(ErrorClass::InvalidArgument, "temperature field shape mismatch");
    for (double t : temps.values)
        if (!(t >= 0.0)) throw Error(ErrorClass::InvalidArgument, "negative temperature in sweep");

    const CounterRng rng(mix_seed(seed, detail::kSweepSalt));
    const double q = params.modification;
    const double j = params.coupling;
    const auto rows = static_cast<std::size_t>(s.height);
    std::vector<std::size_t> attempted(rows), accepted(rows);
    SweepStats total;

    for (Color color : {Color::A, Color::B}) {
        observer.begin_phase(color);
        parallel_for(rows, threads, [&](std::size_t r) {
            const int row = static_cast<int>(r);
            std::size_t att = 0, acc = 0;
            const int first = (row + static_cast<int>(color)) % 2;
            for (int c = first; c < s.width; c += 2) {
                const std::size_t i = s.index(row, c);
                if (f.is_fixed(i)) continue;
                ++att;
                const auto [u_prop, u_acc] = rng.uniforms(sweep_index, i);
                const double current = f.angles[i];
                const double proposal = kTwoPi * u_prop;
                double delta = 0.0;
                auto bond = [&](std::size_t n) {
                    observer.on_read(i, n);
                    const double other = f.angles[n];
                    delta += std::cos(q * (current - other)) - std::cos(q * (proposal - other));
                };
                if (row > 0) bond(i - static_cast<std::size_t>(s.width));
                if (row + 1 < s.height) bond(i + static_cast<std::size_t>(s.width));
                if (c > 0) bond(i - 1);
                if (c + 1 < s.width) bond(i + 1);
                delta *= j;
                const double t = temps.values[i];
                const bool take = delta <= 0.0 || (t > 0.0 && u_acc < std::exp(-delta / t));
                if (take) {
                    observer.on_write(i);
                    f.angles[i] = proposal;
                    ++acc;
                }
            }
            attempted[r] += att;
            accepted[r] += acc;
        });
    }
    for (std::size_t r = 0; r < rows; ++r) {
        total.attempted += attempted[r];
        total.accepted += accepted[r];
    }
    return total;
}

// Grid specific energy with the constant FIXED-FIXED bond sums cached per row.
// Summation order depends only on the grid, never on the worker count.
class EnergyMeter {
public:
    EnergyMeter(const AngleField& f, const MprParams& params) : params_(params), shape_(f.shape) {
        const auto rows = static_cast<std::size_t>(shape_.height);
        fixed_sum_.assign(rows, 0.0);
        row_begin_.assign(rows + 1, 0);
        const double q = params.modification;
        for (int r = 0; r < shape_.height; ++r) {
            row_begin_[static_cast<std::size_t>(r)] = bonds_.size();
            double acc = 0.0;
            auto add = [&](std::size_t i, std::size_t n) {
                if (f.is_fixed(i) && f.is_fixed(n))
                    acc += std::cos(q * (f.angles[i] - f.angles[n]));
                else
                    bonds_.push_back({i, n});
            };
            for (int c = 0; c < shape_.width; ++c) {
                const std::size_t i = shape_.index(r, c);
                if (c + 1 < shape_.width) add(i, i + 1);
                if (r + 1 < shape_.height) add(i, i + static_cast<std::size_t>(shape_.width));
            }
            fixed_sum_[static_cast<std::size_t>(r)] = acc;
        }
        row_begin_[rows] = bonds_.size();
        total_bonds_ = shape_.bond_count();
    }

    double operator()(const AngleField& f, Threads threads) const {
        if (total_bonds_ == 0) return 0.0;
        const auto rows = static_cast<std::size_t>(shape_.height);
        std::vector<double> sums(rows);
        const double q = params_.modification;
        parallel_for(rows, threads, [&](std::size_t r) {
            double acc = fixed_sum_[r];
            for (std::size_t b = row_begin_[r]; b < row_begin_[r + 1]; ++b)
                acc += std::cos(q * (f.angles[bonds_[b].first] - f.angles[bonds_[b].second]));
            sums[r] = acc;
        });
        return -params_.coupling * pairwise_sum(sums) / static_cast<double>(total_bonds_);
    }

private:
    struct Bond {
        std::size_t first;
        std::size_t second;
    };
    MprParams params_;
    GridShape shape_;
    std::vector<double> fixed_sum_;
    std::vector<std::size_t> row_begin_;
    std::vector<Bond> bonds_;
    std::size_t total_bonds_ = 0;
};

struct SimulationDiagnostics {
    int equilibration_sweeps = 0;   // sweeps run before averaging started
    bool equilibrated = false;      // false when max_sweeps was hit
    int total_sweeps = 0;
    double final_energy = 0.0;
    double mean_equilibrium_energy = 0.0;  // mean e over the averaging sweeps
    double mean_acceptance = 1.0;
    bool degenerate_range = false;
    std::vector<std::string> warnings;
};

struct SimulationResult {
    GridField filled;
    EnergyTrace trace;
    SimulationDiagnostics diagnostics;
};

// Conditional simulation: SAMPLE sites clamped, MISSING sites predicted by the
// mean back-transformed value over the averaging sweeps after equilibrium.
inline SimulationResult run_conditional_simulation(const GridField& grid, const TemperatureField& temps,
                                                   const MprParams& params, const SimulationConfig& config) {
    params.validate();
    config.validate();
    temps.validate();
    if (temps.shape != grid.shape()) throw Error(ErrorClass::InvalidArgument, "temperature field shape mismatch");

    SimulationResult result{grid, {}, {}};
    if (grid.missing_count() == 0) return result;

    const TransformParams transform = transform_params_from_samples(grid);
    if (transform.degenerate()) {
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (grid.is_missing(i)) result.filled.set_value(i, transform.z_min);
        result.diagnostics.degenerate_range = true;
        result.diagnostics.equilibrated = true;
        result.diagnostics.warnings.push_back("degenerate sample range: constant fill");
        return result;
    }

    AngleField angles = to_angles(grid, transform);
    angles = initialize_angles(std::move(angles), BlockDecomposition(grid.shape(), config.init_block_size),
                               config.init, config.seed);
    const EnergyMeter energy(angles, params);
    auto& diag = result.diagnostics;
    auto& trace = result.trace;

    std::uint64_t sweep = 0;
    double acceptance_sum = 0.0;
    while (static_cast<int>(sweep) < config.max_sweeps) {
        acceptance_sum += metropolis_sweep(angles, temps, params, sweep, config.seed, config.threads).acceptance_ratio();
        ++sweep;
        trace.push(energy(angles, config.threads));
        if (detect_equilibrium(trace, config)) {
            diag.equilibrated = true;
            break;
        }
    }
    diag.equilibration_sweeps = static_cast<int>(sweep);
    if (!diag.equilibrated) diag.warnings.push_back("equilibrium not detected within max_sweeps");

    std::vector<std::size_t> free_sites;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!angles.is_fixed(i)) free_sites.push_back(i);
    std::vector<double> sums(free_sites.size(), 0.0);
    double energy_sum = 0.0;
    for (int k = 0; k < config.averaging_sweeps; ++k) {
        acceptance_sum += metropolis_sweep(angles, temps, params, sweep, config.seed, config.threads).acceptance_ratio();
        ++sweep;
        trace.push(energy(angles, config.threads));
        energy_sum += trace.back();
        parallel_for(free_sites.size(), config.threads, [&](std::size_t k2) {
            sums[k2] += angle_to_value(angles.angles[free_sites[k2]], transform);
        });
    }
    const auto count = static_cast<double>(config.averaging_sweeps);
    for (std::size_t k = 0; k < free_sites.size(); ++k)
        result.filled.set_value(free_sites[k], std::clamp(sums[k] / count, transform.z_min, transform.z_max));

    diag.total_sweeps = static_cast<int>(sweep);
    diag.final_energy = trace.back();
    diag.mean_equilibrium_energy = energy_sum / count;
    diag.mean_acceptance = acceptance_sum / static_cast<double>(sweep);
    return result;
}

enum class UnconditionalStart { Ordered, Random };

struct UnconditionalRun {
    double mean_energy = 0.0;
    double standard_error = 0.0;  // batch-means estimate
    EnergyTrace trace;
};

// Standard error of the mean from non-overlapping batch means.
inline double batch_means_standard_error(const std::vector<double>& xs, std::size_t batches = 20) {
    const std::size_t len = xs.size() / batches;
    if (len == 0 || batches < 2) return 0.0;
    std::vector<double> means(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        for (std::size_t k = 0; k < len; ++k) means[b] += xs[b * len + k];
        means[b] /= static_cast<double>(len);
    }
    double m = 0.0;
    for (double v : means) m += v;
    m /= static_cast<double>(batches);
    double var = 0.0;
    for (double v : means) var += (v - m) * (v - m);
    var /= static_cast<double>(batches - 1);
    return std::sqrt(var / static_cast<double>(batches));
}

// All sites FREE at a single temperature; mean grid energy after burn-in.
inline UnconditionalRun run_unconditional(GridShape shape, double temperature, const MprParams& params,
                                          int burn_in, int averaging, std::uint64_t seed,
                                          UnconditionalStart start = UnconditionalStart::Ordered,
                                          Threads threads = {1}) {
    params.validate();
    AngleField f{shape, std::vector<double>(shape.size(), std::numbers::pi),
                 std::vector<SpinState>(shape.size(), SpinState::Free)};
    if (start == UnconditionalStart::Random) {
        const CounterRng rng(mix_seed(seed, detail::kInitSalt));
        for (std::size_t i = 0; i < f.angles.size(); ++i) f.angles[i] = kTwoPi * rng.uniforms(0, i).first;
    }
    const TemperatureField temps = uniform_temperature(shape, temperature);
    const EnergyMeter energy(f, params);
    UnconditionalRun out;
    std::uint64_t sweep = 0;
    for (int k = 0; k < burn_in; ++k) {
        metropolis_sweep(f, temps, params, sweep++, seed, threads);
        out.trace.push(energy(f, threads));
    }
    std::vector<double> tail;
    tail.reserve(static_cast<std::size_t>(averaging));
    for (int k = 0; k < averaging; ++k) {
        metropolis_sweep(f, temps, params, sweep++, seed, threads);
        out.trace.push(energy(f, threads));
        tail.push_back(out.trace.back());
    }
    double sum = 0.0;
    for (double e : tail) sum += e;
    out.mean_energy = tail.empty() ? 0.0 : sum / static_cast<double>(tail.size());
    out.standard_error = batch_means_standard_error(tail);
    return out;
}

} // namespace mprfill
