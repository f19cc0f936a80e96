#pragma once

// Umbrella header (the CLI lives in cli.hpp and needs CLI11 on the include path).

#include "certificates.hpp"
#include "config.hpp"
#include "convolution.hpp"
#include "domain.hpp"
#include "error.hpp"
#include "evolution.hpp"
#include "experiments.hpp"
#include "field_io.hpp"
#include "kernel.hpp"
#include "nonlinearity.hpp"
#include "quadrature.hpp"
#include "scenarios.hpp"
#include "traveling_wave.hpp"
#include "version.hpp"
#include "zfunction.hpp"
