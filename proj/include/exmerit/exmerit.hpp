#pragma once

// Umbrella header: extended-exactness merit functions for nonlinear
// semidefinite programming, with certification diagnostics and a brute-force
// oracle.

#include "exmerit/ext_real.hpp"
#include "exmerit/symmat.hpp"
#include "exmerit/problems.hpp"
#include "exmerit/auglag.hpp"
#include "exmerit/penalty.hpp"
#include "exmerit/solver.hpp"
#include "exmerit/oracle.hpp"
#include "exmerit/certify.hpp"
#include "exmerit/io_json.hpp"
