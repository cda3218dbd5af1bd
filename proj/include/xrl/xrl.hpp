#pragma once

#include "xrl/analysis.hpp"
#include "xrl/config.hpp"
#include "xrl/core.hpp"
#include "xrl/csv.hpp"
#include "xrl/errors.hpp"
#include "xrl/experiment.hpp"
#include "xrl/explainers.hpp"
#include "xrl/harness.hpp"
#include "xrl/learner.hpp"
#include "xrl/linalg.hpp"
#include "xrl/narrate.hpp"
#include "xrl/nav.hpp"
#include "xrl/rng.hpp"
#include "xrl/sort.hpp"
#include "xrl/svg.hpp"
#include "xrl/table.hpp"
