#pragma once

// Umbrella header for the approximate joint diagonalization toolkit.

#include "ajd/eigen.hpp"
#include "ajd/errors.hpp"
#include "ajd/matrix.hpp"
#include "ajd/matrix_io.hpp"
#include "ajd/matrix_set.hpp"
#include "ajd/ojd.hpp"
#include "ajd/rng.hpp"
#include "ajd/sdiag.hpp"
#include "ajd/simulation.hpp"
#include "ajd/solve.hpp"
