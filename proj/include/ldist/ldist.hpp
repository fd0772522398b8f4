#pragma once

#include "ldist/commands.hpp"
#include "ldist/dataset.hpp"
#include "ldist/distance.hpp"
#include "ldist/equation.hpp"
#include "ldist/error.hpp"
#include "ldist/fidelity.hpp"
#include "ldist/mlp.hpp"
#include "ldist/trace.hpp"
#include "ldist/trace_io.hpp"
#include "ldist/trainer.hpp"
