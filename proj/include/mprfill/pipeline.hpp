#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mprfill/error.hpp"
#include "mprfill/grid.hpp"
#include "mprfill/idw.hpp"
#include "mprfill/mpr_model.hpp"
#include "mprfill/simulation.hpp"
#include "mprfill/sv_temperature.hpp"
#include "mprfill/temperature_field.hpp"

namespace mprfill {

enum class Method { Mpr, SvmprBst, SvmprSst, Idw };

constexpr std::string_view method_name(Method m) noexcept {
    switch (m) {
    case Method::Mpr: return "mpr";
    case Method::SvmprBst: return "svmpr-bst";
    case Method::SvmprSst: return "svmpr-sst";
    case Method::Idw: return "idw";
    }
    return "unknown";
}

inline Method parse_method(std::string_view s) {
    if (s == "mpr") return Method::Mpr;
    if (s == "bst" || s == "svmpr-bst") return Method::SvmprBst;
    if (s == "sst" || s == "svmpr-sst") return Method::SvmprSst;
    if (s == "idw") return Method::Idw;
    throw Error(ErrorClass::InvalidArgument, "unknown method '" + std::string(s) + "'");
}

struct MethodConfig {
    Method method = Method::Mpr;
    MprParams params{};
    int block_size = 32;
    std::optional<double> smoothing_radius;  // default block_size / 4
    int smoothing_passes = 5;
    SimulationConfig simulation{};
    std::optional<InitStrategy> init_override;  // default: RANDOM for MPR, BLOCK_MEAN for SV-MPR
    IdwParams idw{};

    double resolved_smoothing_radius() const noexcept {
        return smoothing_radius.value_or(std::max(1.0, block_size / 4.0));
    }
    InitStrategy resolved_init() const noexcept {
        if (init_override) return *init_override;
        return method == Method::Mpr ? InitStrategy::Random : InitStrategy::BlockMean;
    }
};

struct FillResult {
    GridField filled;
    std::optional<TemperatureField> temperatures;
    double sample_energy = 0.0;       // global e_s
    double global_temperature = 0.0;  // matched uniform T
    bool temperature_clamped = false;
    std::size_t fallback_blocks = 0;
    std::size_t idw_fallbacks = 0;
    EnergyTrace trace;
    SimulationDiagnostics diagnostics;
};

// Temperature field for an MPR-family method from the sample configuration.
inline TemperatureField infer_temperatures(const AngleField& angles, const MethodConfig& cfg,
                                           const CalibrationCurve& curve, FillResult& report) {
    const auto global = sample_specific_energy(angles, cfg.params, cfg.simulation.threads);
    if (global.has_bonds()) {
        const auto est = estimate_temperature(global.energy, curve);
        report.sample_energy = global.energy;
        report.global_temperature = est.temperature;
        report.temperature_clamped = est.clamped;
    }
    if (cfg.method == Method::Mpr) {
        if (!global.has_bonds())
            throw Error(ErrorClass::NoSampleBonds, "no sample-sample bonds: temperature cannot be matched");
        auto field = uniform_temperature(angles.shape, report.global_temperature);
        return field;
    }
    const BlockDecomposition blocks(angles.shape, cfg.block_size);
    auto stats = assign_block_temperatures(block_sample_energies(angles, blocks, cfg.params, cfg.simulation.threads),
                                           curve, global);
    for (const auto& b : stats.blocks) report.fallback_blocks += b.fallback;
    report.diagnostics.warnings.insert(report.diagnostics.warnings.end(), stats.warnings.begin(),
                                       stats.warnings.end());
    auto field = expand_to_sites(stats, blocks);
    if (cfg.method == Method::SvmprSst) {
        field = smooth_temperatures(field, cfg.resolved_smoothing_radius(), cfg.smoothing_passes,
                                    cfg.simulation.threads);
        field.provenance.block_size = cfg.block_size;
    }
    return field;
}

// Fills every MISSING site of `grid` with the configured method.
inline FillResult fill_gaps(const GridField& grid, const MethodConfig& cfg, const CalibrationCurve& curve) {
    FillResult out{grid, std::nullopt, 0.0, 0.0, false, 0, 0, {}, {}};
    if (grid.sample_count() == 0) throw Error(ErrorClass::NoSamples, "grid has no samples");

    if (cfg.method == Method::Idw) {
        auto idw = idw_predict(grid, cfg.idw, cfg.simulation.threads);
        out.filled = std::move(idw.filled);
        out.idw_fallbacks = idw.fallback_count;
        return out;
    }

    const TransformParams transform = transform_params_from_samples(grid);
    SimulationConfig sim = cfg.simulation;
    sim.init = cfg.resolved_init();
    sim.init_block_size = cfg.block_size;

    if (transform.degenerate() || grid.missing_count() == 0) {
        auto res = run_conditional_simulation(grid, uniform_temperature(grid.shape(), 0.0), cfg.params, sim);
        out.filled = std::move(res.filled);
        out.diagnostics = std::move(res.diagnostics);
        return out;
    }

    const AngleField angles = to_angles(grid, transform);
    TemperatureField temps = infer_temperatures(angles, cfg, curve, out);
    auto res = run_conditional_simulation(grid, temps, cfg.params, sim);
    out.filled = std::move(res.filled);
    out.trace = std::move(res.trace);
    auto warnings = std::move(out.diagnostics.warnings);
    out.diagnostics = std::move(res.diagnostics);
    out.diagnostics.warnings.insert(out.diagnostics.warnings.begin(), warnings.begin(), warnings.end());
    out.temperatures = std::move(temps);
    return out;
}

} // namespace mprfill
