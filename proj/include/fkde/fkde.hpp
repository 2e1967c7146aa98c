#pragma once

#include "fkde/error.hpp"
#include "fkde/estimator.hpp"
#include "fkde/experiments.hpp"
#include "fkde/frontier.hpp"
#include "fkde/kernel.hpp"
#include "fkde/model.hpp"
#include "fkde/rng.hpp"
#include "fkde/sim.hpp"
#include "fkde/stats.hpp"
