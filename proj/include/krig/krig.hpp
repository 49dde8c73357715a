#pragma once

// Umbrella header for the Kriging inpainting library.

#include "krig/core.hpp"
#include "krig/inpaint.hpp"
#include "krig/kriging.hpp"
#include "krig/maskgen.hpp"
#include "krig/metrics.hpp"
#include "krig/variogram.hpp"
