#pragma once

// Numerical laboratory for the damped, time-delayed Kawahara equation on a
// bounded interval: IMEX time stepping with exact method-of-steps delay
// storage, energy/Lyapunov functionals with discrete decay checks, explicit
// stability constants, and the augmented-generator spectrum.

#include "kawalab/banded.hpp"
#include "kawalab/config.hpp"
#include "kawalab/csv.hpp"
#include "kawalab/delay.hpp"
#include "kawalab/functionals.hpp"
#include "kawalab/grid.hpp"
#include "kawalab/operators.hpp"
#include "kawalab/params.hpp"
#include "kawalab/scenario.hpp"
#include "kawalab/spectral.hpp"
#include "kawalab/stepper.hpp"
#include "kawalab/theory.hpp"
