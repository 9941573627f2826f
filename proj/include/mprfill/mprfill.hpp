#pragma once

#include "mprfill/calibration.hpp"
#include "mprfill/calibration_io.hpp"
#include "mprfill/error.hpp"
#include "mprfill/grid.hpp"
#include "mprfill/idw.hpp"
#include "mprfill/mpr_model.hpp"
#include "mprfill/parallel.hpp"
#include "mprfill/philox.hpp"
#include "mprfill/pipeline.hpp"
#include "mprfill/raster_io.hpp"
#include "mprfill/report.hpp"
#include "mprfill/simulation.hpp"
#include "mprfill/sv_temperature.hpp"
#include "mprfill/temperature_field.hpp"
#include "mprfill/validation.hpp"
