#pragma once

// Distributed-memory graph coloring on a simulated message-passing cluster:
// speculative superstep coloring with conflict resolution, iterative
// synchronous/asynchronous recoloring with color-class permutations, a
// piggybacking communication planner, and a benchmark harness.

#include "distcolor/bench.hpp"
#include "distcolor/coloring.hpp"
#include "distcolor/config.hpp"
#include "distcolor/graph.hpp"
#include "distcolor/graph_io.hpp"
#include "distcolor/greedy.hpp"
#include "distcolor/mailbox.hpp"
#include "distcolor/metrics.hpp"
#include "distcolor/ordering.hpp"
#include "distcolor/partition.hpp"
#include "distcolor/protocol.hpp"
#include "distcolor/recolor.hpp"
#include "distcolor/rmat.hpp"
#include "distcolor/rng.hpp"
#include "distcolor/selection.hpp"
#include "distcolor/types.hpp"
