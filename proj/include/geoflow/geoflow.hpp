#pragma once

// Level-set geometry engine: surface functionals, their shape gradients, and
// gradient-descent geometric flows on uniform 3D grids.

#include "geoflow/config.hpp"
#include "geoflow/core.hpp"
#include "geoflow/dynamics.hpp"
#include "geoflow/errors.hpp"
#include "geoflow/functionals.hpp"
#include "geoflow/geometry.hpp"
#include "geoflow/grid.hpp"
#include "geoflow/io.hpp"
#include "geoflow/level_set.hpp"
#include "geoflow/quadrature.hpp"
#include "geoflow/shapes.hpp"
#include "geoflow/stencils.hpp"
