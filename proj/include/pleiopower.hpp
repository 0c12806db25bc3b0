#pragma once

#include "pleiopower/error.hpp"
#include "pleiopower/rng.hpp"
#include "pleiopower/parallel.hpp"
#include "pleiopower/stats_dist.hpp"
#include "pleiopower/model_core.hpp"
#include "pleiopower/optimize.hpp"
#include "pleiopower/likelihood.hpp"
#include "pleiopower/linkage_tests.hpp"
#include "pleiopower/power.hpp"
#include "pleiopower/simulate.hpp"
#include "pleiopower/design.hpp"
#include "pleiopower/io.hpp"
