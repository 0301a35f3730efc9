#pragma once

#include "galpha/errors.hpp"
#include "galpha/params.hpp"
#include "galpha/problems.hpp"
#include "galpha/integrator.hpp"
#include "galpha/spectral.hpp"
#include "galpha/cayley.hpp"
#include "galpha/convergence.hpp"
