#pragma once

#include "equilib/errors.hpp"
#include "equilib/numeric.hpp"
#include "equilib/force_law.hpp"
#include "equilib/config.hpp"
#include "equilib/tail_sum.hpp"
#include "equilib/residuals.hpp"
#include "equilib/solver_options.hpp"
#include "equilib/line_system.hpp"
#include "equilib/line_solvers.hpp"
#include "equilib/circle_solver.hpp"
#include "equilib/certificates.hpp"
#include "equilib/diagnostics.hpp"
