#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "mprfill/error.hpp"
#include "mprfill/grid.hpp"

namespace mprfill {

enum class TemperatureKind { Uniform, BlockSpecific, SiteSpecific };

struct TemperatureProvenance {
    TemperatureKind kind = TemperatureKind::Uniform;
    int block_size = 0;
    double smoothing_radius = 0.0;
    int smoothing_passes = 0;

    std::string describe() const {
        switch (kind) {
        case TemperatureKind::Uniform: return "UNIFORM";
        case TemperatureKind::BlockSpecific: return "BST(" + std::to_string(block_size) + ")";
        case TemperatureKind::SiteSpecific: {
            char buf[96];
            std::snprintf(buf, sizeof buf, "SST(%d,%g,%d)", block_size, smoothing_radius, smoothing_passes);
            return buf;
        }
        }
        return "UNKNOWN";
    }
};

// Per-site reduced temperature, T(s) >= 0 and finite.
struct TemperatureField {
    GridShape shape{};
    std::vector<double> values;
    TemperatureProvenance provenance{};

    double operator[](std::size_t site) const noexcept { return values[site]; }

    void validate() const {
        if (values.size() != shape.size())
            throw Error(ErrorClass::InvalidArgument, "temperature field does not match grid shape");
        for (double t : values)
            if (!(t >= 0.0) || !std::isfinite(t))
                throw Error(ErrorClass::InvalidArgument, "temperatures must be finite and >= 0");
    }
};

inline TemperatureField uniform_temperature(GridShape shape, double t) {
    TemperatureField f{shape, std::vector<double>(shape.size(), t), {}};
    f.validate();
    return f;
}

} // namespace mprfill
