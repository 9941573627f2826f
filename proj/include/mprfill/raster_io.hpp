#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mprfill/error.hpp"
#include "mprfill/grid.hpp"
#include "mprfill/temperature_field.hpp"

namespace mprfill {

// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view tok) {
    double v = 0.0;
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) return std::nullopt;
    return v;
}

inline constexpr double kDefaultNodata = -9999.0;

struct RasterHeader {
    int ncols = 0;
    int nrows = 0;
    double nodata = kDefaultNodata;
};

namespace detail {

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline std::ifstream open_for_read(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec))
        throw Error(ErrorClass::IoNotFound, path.string() + ": file not found");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorClass::IoError, path.string() + ": cannot open for reading");
    return in;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorClass::IoError, path.string() + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorClass::IoError, path.string() + ": write failed");
}

inline bool near_sentinel(double v, double sentinel) noexcept {
    return v != sentinel && std::abs(v - sentinel) <= 1e-9 * std::max(1.0, std::abs(sentinel));
}

} // namespace detail

// ASCII grid: "ncols", "nrows", optional georeferencing keys (ignored),
// optional "NODATA_value", then nrows lines of ncols values, top row first.
inline GridField parse_raster(std::istream& in, const std::string& name = "<stream>") {
    RasterHeader header;
    bool have_cols = false, have_rows = false;
    std::string line;
    int line_no = 0;
    std::vector<std::string> pending;  // first data line, if the header ended on it
    int pending_line = 0;

    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        const std::string k = detail::lower(key);
        const bool is_header = k == "ncols" || k == "nrows" || k == "nodata_value" || k == "xllcorner" ||
                               k == "yllcorner" || k == "xllcenter" || k == "yllcenter" || k == "cellsize";
        if (!is_header) {
            pending.push_back(line);
            pending_line = line_no;
            break;
        }
        std::string val;
        if (!(ls >> val))
            throw Error(ErrorClass::ParseError, name + ":" + std::to_string(line_no) + ": header key '" + key +
                                                    "' has no value");
        const auto num = parse_double(val);
        if (!num)
            throw Error(ErrorClass::ParseError, name + ":" + std::to_string(line_no) + ": header value '" + val +
                                                    "' is not a number");
        if (k == "ncols" || k == "nrows") {
            if (*num < 1 || *num != std::floor(*num) || *num > 1e8)
                throw Error(ErrorClass::ParseError, name + ":" + std::to_string(line_no) + ": invalid " + key);
            (k == "ncols" ? header.ncols : header.nrows) = static_cast<int>(*num);
            (k == "ncols" ? have_cols : have_rows) = true;
        } else if (k == "nodata_value") {
            header.nodata = *num;
        }
    }
    if (!have_cols || !have_rows)
        throw Error(ErrorClass::ParseError, name + ":" + std::to_string(line_no) + ": header lacks ncols/nrows");

    const GridShape shape{header.ncols, header.nrows};
    const std::size_t expected = shape.size();
    GridField grid(shape);
    std::size_t count = 0;
    auto consume = [&](const std::string& text, int at_line) {
        std::istringstream ls(text);
        std::string tok;
        while (ls >> tok) {
            const auto v = parse_double(tok);
            if (!v)
                throw Error(ErrorClass::ParseError,
                            name + ":" + std::to_string(at_line) + ": value '" + tok + "' is not a number");
            if (count < expected) {
                if (*v == header.nodata) {
                    // stays MISSING
                } else if (detail::near_sentinel(*v, header.nodata)) {
                    throw Error(ErrorClass::SentinelCollision, name + ":" + std::to_string(at_line) + ": value " + tok +
                                                                   " is ambiguous with NODATA_value " +
                                                                   format_double(header.nodata));
                } else if (!std::isfinite(*v)) {
                    throw Error(ErrorClass::ParseError,
                                name + ":" + std::to_string(at_line) + ": non-finite value '" + tok + "'");
                } else {
                    grid.set_value(count, *v);
                }
            }
            ++count;
        }
    };
    for (const auto& p : pending) consume(p, pending_line);
    while (std::getline(in, line)) {
        ++line_no;
        consume(line, line_no);
    }
    if (count != expected)
        throw Error(ErrorClass::CountMismatch, name + ": expected " + std::to_string(expected) + " values (" +
                                                   std::to_string(shape.width) + "x" + std::to_string(shape.height) +
                                                   "), found " + std::to_string(count));
    return grid;
}

inline GridField load_raster(const std::filesystem::path& path) {
    auto in = detail::open_for_read(path);
    return parse_raster(in, path.string());
}

inline std::string format_raster(const GridField& grid, double nodata = kDefaultNodata) {
    std::string out;
    out.reserve(grid.size() * 12 + 64);
    out += "ncols " + std::to_string(grid.width()) + "\n";
    out += "nrows " + std::to_string(grid.height()) + "\n";
    out += "NODATA_value " + format_double(nodata) + "\n";
    for (int r = 0; r < grid.height(); ++r) {
        for (int c = 0; c < grid.width(); ++c) {
            const std::size_t i = grid.shape().index(r, c);
            if (c) out += ' ';
            if (grid.is_missing(i)) {
                out += format_double(nodata);
                continue;
            }
            const double v = grid.value(i);
            if (v == nodata || detail::near_sentinel(v, nodata))
                throw Error(ErrorClass::SentinelCollision, "sample value " + format_double(v) + " at (" +
                                                               std::to_string(r) + "," + std::to_string(c) +
                                                               ") collides with NODATA_value");
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

inline void write_raster(const GridField& grid, const std::filesystem::path& path, double nodata = kDefaultNodata) {
    detail::write_file(path, format_raster(grid, nodata));
}

inline GridField to_grid(const TemperatureField& temps) {
    return GridField::fully_sampled(temps.shape, temps.values);
}

inline void write_raster(const TemperatureField& temps, const std::filesystem::path& path,
                         double nodata = kDefaultNodata) {
    write_raster(to_grid(temps), path, nodata);
}

enum class ColorScale { Gray, Heat };

struct HeatmapOptions {
    ColorScale scale = ColorScale::Gray;
    std::optional<double> clip_percentile;  // e.g. 95: values above map to the top color
};

struct Rgb {
    unsigned char r, g, b;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Reserved colors for MISSING sites; never produced for data.
inline constexpr unsigned char kMissingGray = 0;
inline constexpr Rgb kMissingRgb{255, 255, 255};

inline Rgb heat_color(double t) noexcept {
    static constexpr Rgb stops[] = {{0, 0, 4}, {120, 28, 109}, {237, 105, 37}, {252, 255, 164}};
    t = std::clamp(t, 0.0, 1.0) * 3.0;
    const int k = std::min(2, static_cast<int>(t));
    const double w = t - k;
    auto lerp = [&](unsigned char a, unsigned char b) {
        return static_cast<unsigned char>(std::lround(a + w * (static_cast<double>(b) - a)));
    };
    return {lerp(stops[k].r, stops[k + 1].r), lerp(stops[k].g, stops[k + 1].g), lerp(stops[k].b, stops[k + 1].b)};
}

// Nearest-rank percentile of the SAMPLE values.
inline double sample_percentile(const GridField& grid, double pct) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid.is_sample(i)) xs.push_back(grid.value(i));
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const double rank = std::ceil(std::clamp(pct, 0.0, 100.0) / 100.0 * static_cast<double>(xs.size()));
    const auto idx = static_cast<std::size_t>(std::max(1.0, rank)) - 1;
    return xs[std::min(idx, xs.size() - 1)];
}

// Binary PGM (gray, data levels 1..255) or PPM (heat ramp). Linear scale
// from the sample minimum to the maximum or the clip percentile.
inline std::string render_heatmap(const GridField& grid, const HeatmapOptions& opts = {}) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid.is_sample(i)) {
            lo = std::min(lo, grid.value(i));
            hi = std::max(hi, grid.value(i));
        }
    if (opts.clip_percentile) hi = sample_percentile(grid, *opts.clip_percentile);
    const bool gray = opts.scale == ColorScale::Gray;
    std::string out = (gray ? "P5\n" : "P6\n") + std::to_string(grid.width()) + " " + std::to_string(grid.height()) +
                      "\n255\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.is_missing(i)) {
            if (gray) {
                out += static_cast<char>(kMissingGray);
            } else {
                out += static_cast<char>(kMissingRgb.r);
                out += static_cast<char>(kMissingRgb.g);
                out += static_cast<char>(kMissingRgb.b);
            }
            continue;
        }
        const double t = hi > lo ? std::clamp((grid.value(i) - lo) / (hi - lo), 0.0, 1.0) : 0.0;
        if (gray) {
            out += static_cast<char>(1 + std::lround(254.0 * t));
        } else {
            const Rgb c = heat_color(t);
            out += static_cast<char>(c.r);
            out += static_cast<char>(c.g);
            out += static_cast<char>(c.b);
        }
    }
    return out;
}

inline void emit_heatmap(const GridField& grid, const std::filesystem::path& path, const HeatmapOptions& opts = {}) {
    detail::write_file(path, render_heatmap(grid, opts));
}

} // namespace mprfill
