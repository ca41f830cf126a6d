#pragma once

#include "analytic.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "numeric.hpp"
#include "postprocess.hpp"
#include "rational.hpp"
#include "ratpoly.hpp"
#include "sim.hpp"
#include "stencil.hpp"
