#pragma once

// Umbrella header for the whole library.

#include "fredlat/bracket.hpp"
#include "fredlat/cli.hpp"
#include "fredlat/conjugate.hpp"
#include "fredlat/expr.hpp"
#include "fredlat/fredholm.hpp"
#include "fredlat/grid.hpp"
#include "fredlat/nystrom.hpp"
#include "fredlat/order.hpp"
#include "fredlat/problem_file.hpp"
