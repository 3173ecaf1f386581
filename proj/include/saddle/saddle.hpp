#pragma once

// Umbrella header for the double saddle-point solver library.

#include "saddle/dense.hpp"
#include "saddle/dense_eigen.hpp"
#include "saddle/errors.hpp"
#include "saddle/factor.hpp"
#include "saddle/gbsor.hpp"
#include "saddle/generate.hpp"
#include "saddle/gsor.hpp"
#include "saddle/iteration_matrix.hpp"
#include "saddle/krylov.hpp"
#include "saddle/lanczos.hpp"
#include "saddle/matrix_market.hpp"
#include "saddle/preconditioner.hpp"
#include "saddle/problem.hpp"
#include "saddle/problem_io.hpp"
#include "saddle/region_scan.hpp"
#include "saddle/rng.hpp"
#include "saddle/sparse.hpp"
#include "saddle/theory.hpp"
#include "saddle/vec.hpp"
