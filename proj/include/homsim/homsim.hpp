#ifndef HOMSIM_HOMSIM_HPP
#define HOMSIM_HOMSIM_HPP

// Umbrella header.

#include "homsim/analysis.hpp"
#include "homsim/config.hpp"
#include "homsim/constants.hpp"
#include "homsim/counting.hpp"
#include "homsim/csv.hpp"
#include "homsim/dip_fit.hpp"
#include "homsim/errors.hpp"
#include "homsim/fiber.hpp"
#include "homsim/interference.hpp"
#include "homsim/rng.hpp"
#include "homsim/scan.hpp"
#include "homsim/source.hpp"

#endif  // HOMSIM_HOMSIM_HPP
