#pragma once

#include "e91fss/analysis.hpp"
#include "e91fss/analytic.hpp"
#include "e91fss/errors.hpp"
#include "e91fss/execute.hpp"
#include "e91fss/plot.hpp"
#include "e91fss/protocol.hpp"
#include "e91fss/results_io.hpp"
#include "e91fss/rng.hpp"
#include "e91fss/run_config.hpp"
#include "e91fss/statevector.hpp"
#include "e91fss/version.hpp"
