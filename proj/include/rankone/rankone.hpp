#pragma once

// Exact combinatorics of stacking rank-one Z^d constructions and
// Z^d-odometers: canonical finite-index sublattices, descendant sets,
// finite-depth factor and conjugacy criteria with certificates.

#include "rankone/analysis.hpp"
#include "rankone/construction.hpp"
#include "rankone/descendants.hpp"
#include "rankone/gallery.hpp"
#include "rankone/ints.hpp"
#include "rankone/io.hpp"
#include "rankone/lattice.hpp"
#include "rankone/odometer.hpp"
#include "rankone/shape.hpp"
#include "rankone/vec.hpp"
