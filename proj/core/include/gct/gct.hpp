#pragma once

#include "gct/errors.hpp"
#include "gct/filter.hpp"
#include "gct/gformula.hpp"
#include "gct/harness.hpp"
#include "gct/hazards.hpp"
#include "gct/outcome.hpp"
#include "gct/parallel.hpp"
#include "gct/plans.hpp"
#include "gct/quadrature.hpp"
#include "gct/random.hpp"
#include "gct/scenario.hpp"
#include "gct/simulator.hpp"
#include "gct/trajectory.hpp"
