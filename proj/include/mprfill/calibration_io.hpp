#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include "mprfill/calibration.hpp"
#include "mprfill/error.hpp"
#include "mprfill/raster_io.hpp"

namespace mprfill {

inline constexpr std::string_view kCalibrationMagic = "# mprfill calibration curve v1";

inline std::string format_calibration(const CalibrationCurve& curve) {
    const auto& m = curve.metadata();
    std::string out;
    out += std::string(kCalibrationMagic) + "\n";
    out += "modification " + format_double(m.modification) + "\n";
    out += "coupling " + format_double(m.coupling) + "\n";
    out += "reference_size " + std::to_string(m.reference_size) + "\n";
    out += "burn_in_sweeps " + std::to_string(m.burn_in_sweeps) + "\n";
    out += "averaging_sweeps " + std::to_string(m.averaging_sweeps) + "\n";
    out += "seed " + std::to_string(m.seed) + "\n";
    out += "isotonic_adjusted " + std::to_string(m.isotonic_adjusted) + "\n";
    out += "points " + std::to_string(curve.points().size()) + "\n";
    for (const auto& p : curve.points()) out += format_double(p.temperature) + " " + format_double(p.energy) + "\n";
    return out;
}

inline CalibrationCurve parse_calibration(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw Error(ErrorClass::ParseError, name + ":" + std::to_string(line_no) + ": " + msg);
    };
    if (!std::getline(in, line) || line != kCalibrationMagic) {
        line_no = 1;
        fail("not a calibration file");
    }
    ++line_no;
    CalibrationMetadata meta;
    std::size_t count = 0;
    auto read_field = [&](std::string_view key) -> std::string {
        if (!std::getline(in, line)) fail("missing '" + std::string(key) + "'");
        ++line_no;
        std::istringstream ls(line);
        std::string k, v;
        if (!(ls >> k >> v) || k != key) fail("expected '" + std::string(key) + "'");
        return v;
    };
    auto number = [&](const std::string& s) {
        const auto v = parse_double(s);
        if (!v) fail("'" + s + "' is not a number");
        return *v;
    };
    meta.modification = number(read_field("modification"));
    meta.coupling = number(read_field("coupling"));
    meta.reference_size = static_cast<int>(number(read_field("reference_size")));
    meta.burn_in_sweeps = static_cast<int>(number(read_field("burn_in_sweeps")));
    meta.averaging_sweeps = static_cast<int>(number(read_field("averaging_sweeps")));
    meta.seed = std::stoull(read_field("seed"));
    meta.isotonic_adjusted = static_cast<std::size_t>(number(read_field("isotonic_adjusted")));
    count = static_cast<std::size_t>(number(read_field("points")));

    std::vector<CalibrationPoint> points;
    while (points.size() < count && std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string t, e;
        if (!(ls >> t >> e)) fail("expected 'T e'");
        points.push_back({number(t), number(e)});
    }
    if (points.size() != count)
        throw Error(ErrorClass::CountMismatch, name + ": expected " + std::to_string(count) + " points, found " +
                                                   std::to_string(points.size()));
    return CalibrationCurve(std::move(points), meta);
}

inline CalibrationCurve load_calibration(const std::filesystem::path& path) {
    auto in = detail::open_for_read(path);
    return parse_calibration(in, path.string());
}

inline void write_calibration(const CalibrationCurve& curve, const std::filesystem::path& path) {
    detail::write_file(path, format_calibration(curve));
}

// Cache directory: $MPRFILL_CALIBRATION_DIR, else ./.mprfill-cache.
inline std::filesystem::path calibration_cache_dir() {
    if (const char* env = std::getenv("MPRFILL_CALIBRATION_DIR"); env && *env) return env;
    return ".mprfill-cache";
}

inline std::string calibration_cache_name(const MprParams& params, const CalibrationOptions& options,
                                          const std::vector<double>& t_grid) {
    return "calibration_q" + format_double(params.modification) + "_J" + format_double(params.coupling) + "_L" +
           std::to_string(options.reference_size) + "_b" + std::to_string(options.burn_in_sweeps) + "_a" +
           std::to_string(options.averaging_sweeps) + "_s" + std::to_string(options.seed) + "_n" +
           std::to_string(t_grid.size()) + "_" + format_double(t_grid.front()) + "-" + format_double(t_grid.back()) +
           ".txt";
}

// Loads the cached curve for these settings or builds and stores it.
inline CalibrationCurve load_or_build_calibration(const MprParams& params, const CalibrationOptions& options,
                                                  const std::vector<double>& t_grid,
                                                  const std::filesystem::path& dir, bool* built = nullptr) {
    const auto path = dir / calibration_cache_name(params, options, t_grid);
    std::error_code ec;
    if (std::filesystem::exists(path, ec)) {
        if (built) *built = false;
        return load_calibration(path);
    }
    auto result = build_calibration_curve(params, t_grid, options);
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorClass::IoError, dir.string() + ": cannot create cache directory");
    const auto tmp = path.string() + ".tmp";
    write_calibration(result.curve, tmp);
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorClass::IoError, path.string() + ": cannot store calibration");
    if (built) *built = true;
    return result.curve;
}

} // namespace mprfill
