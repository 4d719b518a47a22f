#pragma once

// Umbrella header for the grid-based density clustering toolkit.

#include "raster/accumulator.hpp"
#include "raster/agglomerate.hpp"
#include "raster/core.hpp"
#include "raster/datagen.hpp"
#include "raster/errors.hpp"
#include "raster/io.hpp"
#include "raster/metrics.hpp"
#include "raster/parallel.hpp"
#include "raster/pipeline.hpp"
#include "raster/slicing.hpp"
