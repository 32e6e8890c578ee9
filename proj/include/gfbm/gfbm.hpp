#ifndef GFBM_GFBM_HPP
#define GFBM_GFBM_HPP

// Umbrella header: the whole library.

#include "gfbm/errors.hpp"
#include "gfbm/process.hpp"
#include "gfbm/specfun.hpp"
#include "gfbm/quadrature.hpp"
#include "gfbm/stats.hpp"
#include "gfbm/quote.hpp"
#include "gfbm/bs.hpp"
#include "gfbm/cev.hpp"
#include "gfbm/mc.hpp"
#include "gfbm/pde.hpp"

#endif
