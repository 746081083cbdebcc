#pragma once

// Umbrella header.

#include "adapt/version.hpp"
#include "adapt/error.hpp"
#include "adapt/random.hpp"
#include "adapt/glm.hpp"
#include "adapt/simplex.hpp"
#include "adapt/solver.hpp"
#include "adapt/sampling.hpp"
#include "adapt/pipeline.hpp"
#include "adapt/drift.hpp"
#include "adapt/metrics.hpp"
#include "adapt/io.hpp"
#include "adapt/harness.hpp"
