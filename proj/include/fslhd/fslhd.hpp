#pragma once

// Umbrella header for the flexible sliced Latin hypercube design toolkit.

#include "fslhd/commands.hpp"
#include "fslhd/construction.hpp"
#include "fslhd/criteria.hpp"
#include "fslhd/csv.hpp"
#include "fslhd/distance_cache.hpp"
#include "fslhd/evaluator.hpp"
#include "fslhd/level_matrix.hpp"
#include "fslhd/matrix.hpp"
#include "fslhd/neighborhood.hpp"
#include "fslhd/rng.hpp"
#include "fslhd/sese.hpp"
#include "fslhd/slice_spec.hpp"
#include "fslhd/svg.hpp"
#include "fslhd/twopart.hpp"
