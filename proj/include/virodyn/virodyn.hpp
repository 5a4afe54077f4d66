#pragma once

#include "virodyn/analysis.hpp"
#include "virodyn/field.hpp"
#include "virodyn/grid.hpp"
#include "virodyn/linear_solver.hpp"
#include "virodyn/model.hpp"
#include "virodyn/nondim.hpp"
#include "virodyn/sparse.hpp"
#include "virodyn/spectral.hpp"
#include "virodyn/steady.hpp"
#include "virodyn/timestep.hpp"
