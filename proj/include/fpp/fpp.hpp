#pragma once

// Umbrella header for the first-passage percolation toolkit.

#include "busemann.hpp"
#include "config.hpp"
#include "experiments.hpp"
#include "geodesic.hpp"
#include "json_io.hpp"
#include "lattice.hpp"
#include "order.hpp"
#include "shape.hpp"
#include "stats.hpp"
#include "svg.hpp"
#include "weights.hpp"
