#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mprfill/calibration.hpp"
#include "mprfill/pipeline.hpp"
#include "mprfill/raster_io.hpp"
#include "mprfill/validation.hpp"

namespace mprfill {

// Every tunable of a CLI run. Defaults follow the method's published working
// values where one exists (l_b = 32, n_s = 5, n_fit = 20, n_f = 5, beta = 2,
// M = 100).
struct RunConfig {
    std::string command;
    std::vector<Method> methods{Method::Mpr};
    MprParams params{};
    int block_size = 32;
    std::optional<double> smoothing_radius;
    int smoothing_passes = 5;
    int n_fit = 20;
    int n_f = 5;
    int max_sweeps = 500;
    int averaging_sweeps = 100;
    double idw_power = 2.0;
    std::optional<double> idw_radius;  // default: minimum full-coverage radius
    NoNeighborPolicy idw_policy = NoNeighborPolicy::NearestFallback;
    double p = 0.5;
    int realizations = 100;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    CalibrationOptions calibration{};
    std::string input;
    std::string output;

    MethodConfig method_config(Method m) const {
        MethodConfig cfg;
        cfg.method = m;
        cfg.params = params;
        cfg.block_size = block_size;
        cfg.smoothing_radius = smoothing_radius;
        cfg.smoothing_passes = smoothing_passes;
        cfg.simulation.n_fit = n_fit;
        cfg.simulation.n_f = n_f;
        cfg.simulation.max_sweeps = max_sweeps;
        cfg.simulation.averaging_sweeps = averaging_sweeps;
        cfg.simulation.seed = seed;
        cfg.simulation.threads = Threads{threads};
        cfg.idw.power = idw_power;
        cfg.idw.radius = idw_radius.value_or(1.0);
        cfg.idw.policy = idw_policy;
        return cfg;
    }

    // Fully resolved key/value echo; a run is reproducible from these lines.
    std::vector<std::pair<std::string, std::string>> echo() const {
        std::string ms;
        for (auto m : methods) ms += (ms.empty() ? "" : ",") + std::string(method_name(m));
        const MethodConfig probe = method_config(methods.empty() ? Method::Mpr : methods.front());
        return {
            {"config.command", command},
            {"config.methods", ms},
            {"config.q", format_double(params.modification)},
            {"config.J", format_double(params.coupling)},
            {"config.lb", std::to_string(block_size)},
            {"config.rs", format_double(probe.resolved_smoothing_radius())},
            {"config.ns", std::to_string(smoothing_passes)},
            {"config.n_fit", std::to_string(n_fit)},
            {"config.n_f", std::to_string(n_f)},
            {"config.max_sweeps", std::to_string(max_sweeps)},
            {"config.m_avg", std::to_string(averaging_sweeps)},
            {"config.beta", format_double(idw_power)},
            {"config.R", idw_radius ? format_double(*idw_radius) : std::string("auto")},
            {"config.idw_policy", idw_policy == NoNeighborPolicy::Error ? "error" : "nearest"},
            {"config.p", format_double(p)},
            {"config.M", std::to_string(realizations)},
            {"config.seed", std::to_string(seed)},
            {"config.threads", std::to_string(threads)},
            {"config.calibration.size", std::to_string(calibration.reference_size)},
            {"config.calibration.burn_in", std::to_string(calibration.burn_in_sweeps)},
            {"config.calibration.sweeps", std::to_string(calibration.averaging_sweeps)},
            {"config.calibration.seed", std::to_string(calibration.seed)},
            {"config.input", input},
            {"config.output", output},
        };
    }
};

inline std::string format_records(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

inline std::string format_fill_report(const RunConfig& config, const FillResult& res) {
    std::vector<std::pair<std::string, std::string>> kv = config.echo();
    const auto& d = res.diagnostics;
    kv.emplace_back("fill.sample_energy", format_double(res.sample_energy));
    kv.emplace_back("fill.temperature", format_double(res.global_temperature));
    kv.emplace_back("fill.temperature_clamped", res.temperature_clamped ? "1" : "0");
    if (res.temperatures) kv.emplace_back("fill.temperature_kind", res.temperatures->provenance.describe());
    kv.emplace_back("fill.fallback_blocks", std::to_string(res.fallback_blocks));
    kv.emplace_back("fill.idw_fallbacks", std::to_string(res.idw_fallbacks));
    kv.emplace_back("fill.equilibrated", d.equilibrated ? "1" : "0");
    kv.emplace_back("fill.equilibration_sweeps", std::to_string(d.equilibration_sweeps));
    kv.emplace_back("fill.total_sweeps", std::to_string(d.total_sweeps));
    kv.emplace_back("fill.final_energy", format_double(d.final_energy));
    kv.emplace_back("fill.mean_equilibrium_energy", format_double(d.mean_equilibrium_energy));
    kv.emplace_back("fill.mean_acceptance", format_double(d.mean_acceptance));
    kv.emplace_back("fill.degenerate_range", d.degenerate_range ? "1" : "0");
    for (std::size_t k = 0; k < d.warnings.size(); ++k) kv.emplace_back("fill.warning." + std::to_string(k), d.warnings[k]);
    std::string trace;
    for (double e : res.trace.energies) trace += (trace.empty() ? "" : ",") + format_double(e);
    kv.emplace_back("fill.energy_trace", trace);
    return format_records(kv);
}

// Key/value records (timings under "timing.") followed by a table with the
// p / MAAE / MRASE / t columns per method.
inline std::string format_validation_report(const RunConfig& config, const ValidationReport& report,
                                            double calibration_ms = 0.0) {
    auto kv = config.echo();
    for (const auto& m : report.methods) {
        const std::string pre = "method." + m.label + ".";
        kv.emplace_back(pre + "maae", format_double(m.errors.maae));
        kv.emplace_back(pre + "mrase", format_double(m.errors.mrase));
        kv.emplace_back(pre + "aae_ratio", format_double(m.aae_ratio));
        kv.emplace_back(pre + "rase_ratio", format_double(m.rase_ratio));
        kv.emplace_back(pre + "realizations", std::to_string(m.errors.realizations.size()));
        kv.emplace_back(pre + "failures", std::to_string(m.errors.failures.size()));
        for (std::size_t k = 0; k < m.errors.failures.size(); ++k)
            kv.emplace_back(pre + "failure." + std::to_string(k), m.errors.failures[k]);
    }
    for (const auto& m : report.methods)
        kv.emplace_back("timing.method." + m.label + ".mean_ms", format_double(m.errors.mean_runtime_ms));
    kv.emplace_back("timing.calibration_ms", format_double(calibration_ms));
    kv.emplace_back("timing.total_ms", format_double(report.total_runtime_ms));

    std::string out = format_records(kv);
    out += "\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-6s", "p");
    out += buf;
    for (const auto& m : report.methods) {
        std::snprintf(buf, sizeof buf, " | %-30s", m.label.c_str());
        out += buf;
    }
    out += "\n";
    std::snprintf(buf, sizeof buf, "%-6s", "");
    out += buf;
    for (std::size_t k = 0; k < report.methods.size(); ++k) {
        std::snprintf(buf, sizeof buf, " | %9s %9s %10s", "MAAE", "MRASE", "t[ms]");
        out += buf;
    }
    out += "\n";
    std::snprintf(buf, sizeof buf, "%-6g", report.thinning.p);
    out += buf;
    for (const auto& m : report.methods) {
        std::snprintf(buf, sizeof buf, " | %9.4g %9.4g %10.1f", m.errors.maae, m.errors.mrase, m.errors.mean_runtime_ms);
        out += buf;
    }
    out += "\n";
    return out;
}

} // namespace mprfill
