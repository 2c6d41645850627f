#pragma once

// Umbrella header for the Lorentz ball library.

#include "lorentz/extended_real.hpp"
#include "lorentz/summation.hpp"
#include "lorentz/kappa.hpp"
#include "lorentz/norms.hpp"
#include "lorentz/special.hpp"
#include "lorentz/volume.hpp"
#include "lorentz/limit_law.hpp"
#include "lorentz/constants.hpp"
#include "lorentz/rng.hpp"
#include "lorentz/parallel.hpp"
#include "lorentz/sampler.hpp"
#include "lorentz/batch_io.hpp"
#include "lorentz/ks.hpp"
#include "lorentz/report.hpp"
#include "lorentz/experiments.hpp"
#include "lorentz/ode.hpp"
#include "lorentz/config.hpp"
#include "lorentz/report_io.hpp"
#include "lorentz/svg.hpp"
#include "lorentz/artifacts.hpp"
