#pragma once

// Umbrella header for the whole library.

#include "revgeo/errors.hpp"
#include "revgeo/spline.hpp"
#include "revgeo/surface.hpp"
#include "revgeo/ode.hpp"
#include "revgeo/geodesic.hpp"
#include "revgeo/connect.hpp"
#include "revgeo/fermat.hpp"
#include "revgeo/clairaut.hpp"
#include "revgeo/verify.hpp"
#include "revgeo/io.hpp"
#include "revgeo/scenario.hpp"
