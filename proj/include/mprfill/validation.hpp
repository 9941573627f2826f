#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "mprfill/error.hpp"
#include "mprfill/grid.hpp"
#include "mprfill/philox.hpp"
#include "mprfill/pipeline.hpp"

namespace mprfill {

struct ThinningSpec {
    double p = 0.5;
    int realizations = 100;
    std::uint64_t seed = 1;

    void validate() const {
        if (!(p > 0.0 && p < 1.0)) throw Error(ErrorClass::InvalidArgument, "thinning ratio p must be in (0, 1)");
        if (realizations < 1) throw Error(ErrorClass::InvalidArgument, "M must be >= 1");
    }
};

// A thinned copy of the data plus the withheld truth, in site order.
struct Thinning {
    GridField thinned;
    std::vector<std::size_t> held_out;
    std::vector<double> truth;
};

// Removes round(p * N_samples) SAMPLE sites, uniformly without replacement
// (partial Fisher-Yates keyed by (seed, realization)).
inline Thinning make_thinning(const GridField& grid, const ThinningSpec& spec, int realization) {
    spec.validate();
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid.is_sample(i)) candidates.push_back(i);
    const auto remove = static_cast<std::size_t>(std::llround(spec.p * static_cast<double>(candidates.size())));
    if (remove >= candidates.size())
        throw Error(ErrorClass::InvalidArgument, "thinning would remove every sample");

    const CounterRng rng(mix_seed(spec.seed, 0x7417));
    const auto stream = static_cast<std::uint64_t>(realization);
    for (std::size_t k = 0; k < remove; ++k) {
        const std::size_t j = k + rng.below(candidates.size() - k, stream, k);
        std::swap(candidates[k], candidates[j]);
    }
    Thinning out{grid, {candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(remove)}, {}};
    std::sort(out.held_out.begin(), out.held_out.end());
    out.truth.reserve(remove);
    for (auto site : out.held_out) {
        out.truth.push_back(grid.value(site));
        out.thinned.set_missing(site);
    }
    return out;
}

inline std::vector<Thinning> make_thinnings(const GridField& grid, const ThinningSpec& spec) {
    std::vector<Thinning> out;
    out.reserve(static_cast<std::size_t>(spec.realizations));
    for (int m = 0; m < spec.realizations; ++m) out.push_back(make_thinning(grid, spec, m));
    return out;
}

struct RealizationError {
    double aae = 0.0;
    double rase = 0.0;
};

// AAE and RASE over the held-out sites only.
inline RealizationError score(const GridField& predicted, const Thinning& thinning) {
    if (thinning.held_out.empty()) return {};
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t k = 0; k < thinning.held_out.size(); ++k) {
        const auto site = thinning.held_out[k];
        if (site >= predicted.size() || !predicted.is_sample(site))
            throw Error(ErrorClass::InvalidArgument, "no prediction at held-out site " + std::to_string(site));
        const double e = thinning.truth[k] - predicted.value(site);
        abs_sum += std::abs(e);
        sq_sum += e * e;
    }
    const auto n = static_cast<double>(thinning.held_out.size());
    return {abs_sum / n, std::sqrt(sq_sum / n)};
}

struct ErrorStats {
    std::vector<RealizationError> realizations;
    std::vector<double> runtimes_ms;
    std::vector<int> equilibration_sweeps;
    std::vector<double> equilibrium_energies;
    std::vector<std::string> failures;  // one entry per failed realization
    double maae = 0.0;
    double mrase = 0.0;
    double mean_runtime_ms = 0.0;
    double total_runtime_ms = 0.0;

    void finalize() {
        double a = 0.0, r = 0.0;
        for (const auto& e : realizations) {
            a += e.aae;
            r += e.rase;
        }
        const auto n = static_cast<double>(realizations.size());
        maae = realizations.empty() ? 0.0 : a / n;
        mrase = realizations.empty() ? 0.0 : r / n;
        total_runtime_ms = std::accumulate(runtimes_ms.begin(), runtimes_ms.end(), 0.0);
        mean_runtime_ms = runtimes_ms.empty() ? 0.0 : total_runtime_ms / static_cast<double>(runtimes_ms.size());
    }
};

struct MethodReport {
    std::string label;
    MethodConfig config;
    ErrorStats errors;
    double aae_ratio = 1.0;   // MAAE / MAAE(reference)
    double rase_ratio = 1.0;  // MRASE / MRASE(reference)
};

struct ValidationReport {
    ThinningSpec thinning;
    GridShape shape{};
    std::vector<MethodReport> methods;
    double total_runtime_ms = 0.0;
    std::size_t reference = 0;  // index of the ratio denominator
};

struct LabeledMethod {
    std::string label;
    MethodConfig config;
};

// Runs every method on the same thinning realizations. Error ratios use the
// first MPR entry (or the first entry) as the paired reference.
inline ValidationReport compare_methods(const GridField& grid, const ThinningSpec& spec,
                                        const std::vector<LabeledMethod>& methods, const CalibrationCurve& curve,
                                        const std::function<void(int)>& progress = {}) {
    if (methods.empty()) throw Error(ErrorClass::InvalidArgument, "compare_methods needs at least one method");
    spec.validate();
    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();

    ValidationReport report;
    report.thinning = spec;
    report.shape = grid.shape();
    for (const auto& m : methods) report.methods.push_back({m.label, m.config, {}, 1.0, 1.0});

    for (int r = 0; r < spec.realizations; ++r) {
        const Thinning thinning = make_thinning(grid, spec, r);
        for (auto& m : report.methods) {
            MethodConfig cfg = m.config;
            cfg.simulation.seed = mix_seed(m.config.simulation.seed, static_cast<std::uint64_t>(r));
            const auto t0 = clock::now();
            try {
                const FillResult res = fill_gaps(thinning.thinned, cfg, curve);
                const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
                m.errors.realizations.push_back(score(res.filled, thinning));
                m.errors.runtimes_ms.push_back(ms);
                m.errors.equilibration_sweeps.push_back(res.diagnostics.equilibration_sweeps);
                m.errors.equilibrium_energies.push_back(res.diagnostics.mean_equilibrium_energy);
            } catch (const std::exception& e) {
                m.errors.failures.push_back("realization " + std::to_string(r) + ": " + e.what());
            }
        }
        if (progress) progress(r);
    }
    for (auto& m : report.methods) m.errors.finalize();

    for (std::size_t k = 0; k < report.methods.size(); ++k)
        if (report.methods[k].config.method == Method::Mpr) {
            report.reference = k;
            break;
        }
    const auto& ref = report.methods[report.reference].errors;
    for (auto& m : report.methods) {
        m.aae_ratio = ref.maae > 0.0 ? m.errors.maae / ref.maae : 1.0;
        m.rase_ratio = ref.mrase > 0.0 ? m.errors.mrase / ref.mrase : 1.0;
    }
    report.total_runtime_ms = std::chrono::duration<double, std::milli>(clock::now() - t_start).count();
    return report;
}

// Piecewise-stationary test field: box-smoothed Gaussian noise with
// per-regime correlation length and standard deviation, plus regime means.
enum class RegimeLayout { Single, VerticalHalves, Quadrants };

struct Regime {
    double mean = 0.0;
    double sigma = 1.0;
    int correlation_length = 4;  // half-width of the moving-average kernel
};

struct SyntheticFieldSpec {
    int size = 256;
    RegimeLayout layout = RegimeLayout::VerticalHalves;
    std::vector<Regime> regimes{{0.0, 0.1, 4}, {0.0, 10.0, 4}};
    std::uint64_t seed = 1;

    std::size_t regime_of(int row, int col) const noexcept {
        switch (layout) {
        case RegimeLayout::Single: return 0;
        case RegimeLayout::VerticalHalves: return col < size / 2 ? 0 : 1;
        case RegimeLayout::Quadrants: return ((row < size / 2) == (col < size / 2)) ? 0 : 1;
        }
        return 0;
    }
};

namespace detail {

// Normalized box filter of half-width h applied to iid N(0,1) noise: each
// output keeps unit variance (edge windows are clipped and renormalized).
inline std::vector<double> box_smoothed_noise(const std::vector<double>& noise, int n, int h) {
    if (h <= 0) return noise;
    const auto w = static_cast<std::size_t>(n);
    std::vector<double> prefix((w + 1) * (w + 1), 0.0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            prefix[(r + 1) * (w + 1) + c + 1] = noise[r * w + c] + prefix[r * (w + 1) + c + 1] +
                                                prefix[(r + 1) * (w + 1) + c] - prefix[r * (w + 1) + c];
    std::vector<double> out(noise.size());
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const int r0 = std::max(0, r - h), r1 = std::min(n - 1, r + h);
            const int c0 = std::max(0, c - h), c1 = std::min(n - 1, c + h);
            const double s = prefix[(r1 + 1) * (w + 1) + c1 + 1] - prefix[r0 * (w + 1) + c1 + 1] -
                             prefix[(r1 + 1) * (w + 1) + c0] + prefix[r0 * (w + 1) + c0];
            const double count = static_cast<double>((r1 - r0 + 1) * (c1 - c0 + 1));
            out[r * w + c] = s / std::sqrt(count);
        }
    return out;
}

} // namespace detail

inline GridField generate_synthetic_field(const SyntheticFieldSpec& spec) {
    if (spec.size < 2) throw Error(ErrorClass::InvalidArgument, "synthetic field size must be >= 2");
    const std::size_t needed = spec.layout == RegimeLayout::Single ? 1 : 2;
    if (spec.regimes.size() < needed) throw Error(ErrorClass::InvalidArgument, "not enough regimes for layout");
    const int n = spec.size;
    const GridShape shape{n, n};
    const CounterRng rng(mix_seed(spec.seed, 0x5e7));
    std::vector<double> noise(shape.size());
    for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = rng.normal(0, i);

    std::vector<std::vector<double>> smoothed;
    for (const auto& reg : spec.regimes) smoothed.push_back(detail::box_smoothed_noise(noise, n, reg.correlation_length));

    std::vector<double> values(shape.size());
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const std::size_t k = spec.regime_of(r, c);
            const auto& reg = spec.regimes[k];
            const std::size_t i = shape.index(r, c);
            values[i] = reg.mean + reg.sigma * smoothed[k][i];
        }
    return GridField::fully_sampled(shape, std::move(values));
}

} // namespace mprfill
