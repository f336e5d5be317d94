#pragma once

// Everything in one include.

#include "erdos/error.hpp"
#include "erdos/format.hpp"
#include "erdos/graph.hpp"
#include "erdos/ingest.hpp"
#include "erdos/matrix.hpp"
#include "erdos/metrics.hpp"
#include "erdos/pca.hpp"
#include "erdos/sectioning.hpp"
#include "erdos/synth.hpp"
#include "erdos/timestats.hpp"
