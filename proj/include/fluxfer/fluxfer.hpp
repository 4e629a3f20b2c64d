#ifndef FLUXFER_FLUXFER_HPP
#define FLUXFER_FLUXFER_HPP

// Umbrella header.

#include "fluxfer/dynamics.hpp"
#include "fluxfer/experiments.hpp"
#include "fluxfer/invariant.hpp"
#include "fluxfer/model.hpp"
#include "fluxfer/noise.hpp"
#include "fluxfer/pulse.hpp"
#include "fluxfer/steady.hpp"
#include "fluxfer/types.hpp"

#endif
