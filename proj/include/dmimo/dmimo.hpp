#pragma once

// Umbrella header: uplink spectral-efficiency analysis of distributed
// massive MIMO with mixed-resolution ADC receivers.

#include "dmimo/channel.hpp"
#include "dmimo/closed_form.hpp"
#include "dmimo/config.hpp"
#include "dmimo/energy.hpp"
#include "dmimo/experiment.hpp"
#include "dmimo/linalg.hpp"
#include "dmimo/monte_carlo.hpp"
#include "dmimo/quantization.hpp"
#include "dmimo/rng.hpp"
#include "dmimo/stats.hpp"
#include "dmimo/tabular.hpp"
#include "dmimo/topology.hpp"
