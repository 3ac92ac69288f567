// poissonbath.hpp — Umbrella header for the Poisson-noise open-system library

#pragma once

#include "poissonbath/composite.hpp"
#include "poissonbath/errors.hpp"
#include "poissonbath/lindblad.hpp"
#include "poissonbath/models.hpp"
#include "poissonbath/multitime.hpp"
#include "poissonbath/operator.hpp"
#include "poissonbath/poisson_generator.hpp"
#include "poissonbath/propagate.hpp"
#include "poissonbath/quadrature.hpp"
#include "poissonbath/telegraph_bath.hpp"
