#pragma once

#include "lpmono/duality.hpp"
#include "lpmono/error.hpp"
#include "lpmono/experiments.hpp"
#include "lpmono/grid.hpp"
#include "lpmono/io.hpp"
#include "lpmono/operators.hpp"
#include "lpmono/sampling.hpp"
#include "lpmono/schedule.hpp"
#include "lpmono/solver.hpp"
