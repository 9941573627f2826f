// mprfill: gap-filling of gridded data by conditional MPR simulation.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mprfill/mprfill.hpp"

namespace {

using namespace mprfill;

struct CalibrationFlags {
    std::string file;  // explicit curve; overrides the cache
};

void add_model_flags(CLI::App& cmd, RunConfig& cfg) {
    cmd.add_option("--q", cfg.params.modification, "MPR modification parameter q (0, 1/2]");
    cmd.add_option("--J", cfg.params.coupling, "MPR coupling J > 0");
    cmd.add_option("--lb", cfg.block_size, "block size l_b for SV-MPR");
    cmd.add_option("--rs", cfg.smoothing_radius, "SST smoothing radius r_s (default l_b/4)");
    cmd.add_option("--ns", cfg.smoothing_passes, "SST smoothing passes n_s");
    cmd.add_option("--n-fit", cfg.n_fit, "equilibrium test window n_fit");
    cmd.add_option("--n-f", cfg.n_f, "equilibrium test period n_f");
    cmd.add_option("--max-sweeps", cfg.max_sweeps, "hard cap on equilibration sweeps");
    cmd.add_option("--m-avg", cfg.averaging_sweeps, "averaging sweeps after equilibrium");
}

void add_common_flags(CLI::App& cmd, RunConfig& cfg) {
    cmd.add_option("--seed", cfg.seed, "master seed");
    cmd.add_option("--threads", cfg.threads, "worker threads (0 = all cores); results do not depend on it");
}

void add_calibration_flags(CLI::App& cmd, RunConfig& cfg, CalibrationFlags& cal) {
    cmd.add_option("--calibration", cal.file, "calibration curve file (default: cached under $MPRFILL_CALIBRATION_DIR)");
    cmd.add_option("--calibration-size", cfg.calibration.reference_size, "reference grid size for calibration");
    cmd.add_option("--calibration-burn-in", cfg.calibration.burn_in_sweeps, "calibration burn-in sweeps");
    cmd.add_option("--calibration-sweeps", cfg.calibration.averaging_sweeps, "calibration averaging sweeps");
    cmd.add_option("--calibration-seed", cfg.calibration.seed, "calibration seed");
}

void add_idw_flags(CLI::App& cmd, RunConfig& cfg) {
    cmd.add_option("--beta", cfg.idw_power, "IDW power parameter");
    cmd.add_option("--R", cfg.idw_radius, "IDW search radius (default: minimum full-coverage radius)");
    cmd.add_option_function<std::string>(
           "--policy",
           [&cfg](const std::string& s) {
               cfg.idw_policy = s == "error" ? NoNeighborPolicy::Error : NoNeighborPolicy::NearestFallback;
           },
           "empty search disc policy: nearest | error")
        ->check(CLI::IsMember({"nearest", "error"}));
}

CalibrationCurve obtain_curve(const RunConfig& cfg, const CalibrationFlags& cal, double* elapsed_ms = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    CalibrationOptions opts = cfg.calibration;
    opts.threads = Threads{cfg.threads};
    CalibrationCurve curve = cal.file.empty()
                                 ? load_or_build_calibration(cfg.params, opts, default_calibration_temperatures(),
                                                             calibration_cache_dir())
                                 : load_calibration(cal.file);
    if (elapsed_ms)
        *elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return curve;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    detail::write_file(path, text);
}

std::vector<Method> parse_methods(const std::string& list) {
    std::vector<Method> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        const auto end = list.find(',', start);
        const auto tok = list.substr(start, end == std::string::npos ? std::string::npos : end - start);
        if (!tok.empty()) out.push_back(parse_method(tok));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    if (out.empty()) throw Error(ErrorClass::InvalidArgument, "no methods given");
    return out;
}

MethodConfig resolve_idw_radius(MethodConfig mc, const RunConfig& cfg, const GridField& grid) {
    if (mc.method == Method::Idw && !cfg.idw_radius)
        mc.idw.radius = std::max(1.0, min_full_coverage_radius(grid, mc.simulation.threads));
    return mc;
}

Regime parse_regime(const std::string& s) {
    Regime r;
    double mean = 0, sigma = 1, corr = 4;
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &mean, &sigma, &corr) != 3)
        throw Error(ErrorClass::InvalidArgument, "regime must be 'mean,sigma,correlation_length': " + s);
    r.mean = mean;
    r.sigma = sigma;
    r.correlation_length = static_cast<int>(corr);
    return r;
}

int run(int argc, char** argv) {
    CLI::App app{"Gap-filling of gridded data by conditional simulation of the modified planar rotator model"};
    app.require_subcommand(1);

    RunConfig cfg;
    CalibrationFlags cal;

    // fill
    std::string fill_method = "mpr", temperature_map, report_path, heatmap_path;
    double clip = 0.0;
    auto* fill = app.add_subcommand("fill", "fill one raster");
    fill->add_option("--method", fill_method, "mpr | svmpr-bst | svmpr-sst | idw")
        ->check(CLI::IsMember({"mpr", "bst", "sst", "svmpr-bst", "svmpr-sst", "idw"}));
    add_model_flags(*fill, cfg);
    add_common_flags(*fill, cfg);
    add_calibration_flags(*fill, cfg, cal);
    add_idw_flags(*fill, cfg);
    fill->add_option("--temperature-map", temperature_map, "write the temperature field as a raster");
    fill->add_option("--report", report_path, "diagnostics report path (default: stdout)");
    fill->add_option("--heatmap", heatmap_path, "write a PGM heatmap of the filled raster");
    fill->add_option("--clip", clip, "heatmap upper clip percentile (0 = none)");
    fill->add_option("input", cfg.input, "input raster")->required();
    fill->add_option("output", cfg.output, "output raster")->required();

    // validate
    std::string method_list = "mpr,bst,sst";
    auto* validate = app.add_subcommand("validate", "thinning experiment with MAAE/MRASE per method");
    validate->add_option("--p", cfg.p, "fraction of sites removed per realization");
    validate->add_option("--M", cfg.realizations, "number of thinning realizations");
    validate->add_option("--methods", method_list, "comma-separated methods");
    validate->add_option("--report", report_path, "report path (default: stdout)");
    add_model_flags(*validate, cfg);
    add_common_flags(*validate, cfg);
    add_calibration_flags(*validate, cfg, cal);
    add_idw_flags(*validate, cfg);
    validate->add_option("input", cfg.input, "fully sampled input raster")->required();

    // calibrate
    std::string curve_out;
    auto* calibrate = app.add_subcommand("calibrate", "build (or load cached) the T -> e calibration curve");
    calibrate->add_option("--q", cfg.params.modification, "MPR modification parameter q");
    calibrate->add_option("--J", cfg.params.coupling, "MPR coupling J");
    calibrate->add_option("--threads", cfg.threads, "worker threads");
    add_calibration_flags(*calibrate, cfg, cal);
    calibrate->add_option("--out", curve_out, "also write the curve to this path");

    // idw
    auto* idw = app.add_subcommand("idw", "inverse-distance-weighted baseline fill");
    add_idw_flags(*idw, cfg);
    idw->add_option("--threads", cfg.threads, "worker threads");
    idw->add_option("--report", report_path, "report path (default: stdout)");
    idw->add_option("input", cfg.input, "input raster")->required();
    idw->add_option("output", cfg.output, "output raster")->required();

    // synth
    int synth_size = 256;
    std::string layout = "halves";
    std::vector<std::string> regimes;
    auto* synth = app.add_subcommand("synth", "generate a synthetic heterogeneous field");
    synth->add_option("--size", synth_size, "linear size L");
    synth->add_option("--layout", layout, "single | halves | quadrants")
        ->check(CLI::IsMember({"single", "halves", "quadrants"}));
    synth->add_option("--regime", regimes, "regime 'mean,sigma,correlation_length' (repeatable)");
    synth->add_option("--seed", cfg.seed, "seed");
    synth->add_option("output", cfg.output, "output raster")->required();

    // radius
    auto* radius = app.add_subcommand("radius", "minimum IDW radius covering every missing site");
    radius->add_option("input", cfg.input, "input raster")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 2;
    }

    if (fill->parsed()) {
        cfg.command = "fill";
        cfg.methods = {parse_method(fill_method)};
        const GridField grid = load_raster(cfg.input);
        MethodConfig mc = resolve_idw_radius(cfg.method_config(cfg.methods.front()), cfg, grid);
        const CalibrationCurve curve = mc.method == Method::Idw ? CalibrationCurve{} : obtain_curve(cfg, cal);
        const FillResult res = fill_gaps(grid, mc, curve);
        write_raster(res.filled, cfg.output);
        if (!temperature_map.empty() && res.temperatures) write_raster(*res.temperatures, temperature_map);
        if (!heatmap_path.empty()) {
            HeatmapOptions opts;
            if (clip > 0.0) opts.clip_percentile = clip;
            emit_heatmap(res.filled, heatmap_path, opts);
        }
        write_text(report_path, format_fill_report(cfg, res));
        return 0;
    }
    if (validate->parsed()) {
        cfg.command = "validate";
        cfg.methods = parse_methods(method_list);
        const GridField grid = load_raster(cfg.input);
        double cal_ms = 0.0;
        bool needs_curve = false;
        for (auto m : cfg.methods) needs_curve |= (m != Method::Idw);
        const CalibrationCurve curve = needs_curve ? obtain_curve(cfg, cal, &cal_ms) : CalibrationCurve{};
        const ThinningSpec spec{cfg.p, cfg.realizations, cfg.seed};
        std::vector<LabeledMethod> methods;
        for (auto m : cfg.methods) {
            MethodConfig mc = cfg.method_config(m);
            if (m == Method::Idw && !cfg.idw_radius)
                mc.idw.radius = std::max(1.0, min_full_coverage_radius(make_thinning(grid, spec, 0).thinned));
            methods.push_back({std::string(method_name(m)), mc});
        }
        const ValidationReport report = compare_methods(grid, spec, methods, curve);
        write_text(report_path, format_validation_report(cfg, report, cal_ms));
        return 0;
    }
    if (calibrate->parsed()) {
        cfg.command = "calibrate";
        double ms = 0.0;
        const CalibrationCurve curve = obtain_curve(cfg, cal, &ms);
        if (!curve_out.empty()) write_calibration(curve, curve_out);
        if (curve.metadata().isotonic_adjusted > 0)
            std::cerr << "mprfill: warning: isotonic fit adjusted " << curve.metadata().isotonic_adjusted
                      << " calibration points\n";
        std::cout << format_calibration(curve);
        return 0;
    }
    if (idw->parsed()) {
        cfg.command = "idw";
        cfg.methods = {Method::Idw};
        const GridField grid = load_raster(cfg.input);
        const MethodConfig mc = resolve_idw_radius(cfg.method_config(Method::Idw), cfg, grid);
        const IdwResult res = idw_predict(grid, mc.idw, mc.simulation.threads);
        write_raster(res.filled, cfg.output);
        auto kv = cfg.echo();
        kv.emplace_back("idw.radius", format_double(mc.idw.radius));
        kv.emplace_back("idw.fallbacks", std::to_string(res.fallback_count));
        write_text(report_path, format_records(kv));
        return 0;
    }
    if (synth->parsed()) {
        SyntheticFieldSpec spec;
        spec.size = synth_size;
        spec.seed = cfg.seed;
        spec.layout = layout == "single" ? RegimeLayout::Single
                      : layout == "quadrants" ? RegimeLayout::Quadrants
                                              : RegimeLayout::VerticalHalves;
        if (!regimes.empty()) {
            spec.regimes.clear();
            for (const auto& r : regimes) spec.regimes.push_back(parse_regime(r));
        }
        write_raster(generate_synthetic_field(spec), cfg.output);
        return 0;
    }
    if (radius->parsed()) {
        std::cout << format_double(min_full_coverage_radius(load_raster(cfg.input))) << "\n";
        return 0;
    }
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const mprfill::Error& e) {
        std::cerr << "mprfill: error: " << mprfill::error_class_name(e.error_class()) << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "mprfill: error: INTERNAL: " << e.what() << "\n";
        return 1;
    }
}
