#pragma once

#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "forest_spectra/alias.hpp"
#include "forest_spectra/forest.hpp"
#include "forest_spectra/graph.hpp"
#include "forest_spectra/rng.hpp"

namespace forest_spectra {

// Cost counters for one trajectory (or one fixed-q sample).
// sampled = S: freshly read (mark, arrow) stack levels, counted once even
// when the arrow half is only revealed at a later unfreezing.
// rereads = R: extra reads of arrows sampled in an earlier episode.
struct CostStats {
  std::int64_t sampled = 0;
  std::int64_t rereads = 0;
};

// Max-priority queue of unfreeze thresholds. Entries are (q_x, x) where x is
// a MARK-root that stops being a root once the rate drops below q_x.
// Ties break toward the smaller node id.
struct UnfreezeEntry {
  double q;
  std::int32_t node;
  bool operator<(const UnfreezeEntry& o) const {
    if (q != o.q) return q < o.q;
    return node > o.node;
  }
};
using UnfreezeQueue = std::priority_queue<UnfreezeEntry>;

struct WilsonResult {
  Forest forest;
  UnfreezeQueue queue;
  CostStats cost;
};

// Wilson's algorithm at fixed rate q > 0. Each stack read draws a uniform
// mark U; the node roots when U <= q/(q + w(x) + delta(x)). MARK-roots are
// queued with threshold q_x = U*(w(x)+delta(x))/(1-U); killing arrows
// produce KILL-roots which are never queued.
WilsonResult wilson_sample(const WeightedGraph& g, const NeighborSampler& ns,
                           double q, Rng& rng);

struct TrajectorySnapshot {
  double q = 0.0;
  RootMap roots;
};

struct UnfreezeEvent {
  double q;
  std::int32_t node;
};

struct Trajectory {
  // One snapshot per requested grid value, aligned with the input grid
  // (ascending in q). Only root maps are stored.
  std::vector<TrajectorySnapshot> snapshots;
  CostStats cost;
  double q_min = 0.0, q_max = 0.0;
  // Full successor map at q_max (the Algorithm-1 output), kept on request.
  Forest forest_at_qmax;
  // Full successor maps per grid value and the unfreezing-event log, both
  // empty unless requested (memory is O(n) per grid point / per event).
  std::vector<Forest> grid_forests;
  std::vector<UnfreezeEvent> events;
};

struct TrajectoryOptions {
  bool keep_qmax_forest = false;
  bool keep_grid_forests = false;
  bool keep_events = false;
  // Re-checks forest validity and tag bookkeeping after every unfreezing
  // episode; O(n) per event, test use only.
  bool audit = false;
};

// Couples all Kirchhoff forests over [q_min, q_max] through one random
// stream and materializes the root map at each requested grid value
// (grid ascending, within [q_min, q_max]). The snapshot at grid value g is
// the forest after all unfreezing events with threshold strictly above g.
Trajectory coupled_trajectory(const WeightedGraph& g,
                              const NeighborSampler& ns, double q_min,
                              double q_max, std::span<const double> grid,
                              Rng& rng, const TrajectoryOptions& opt = {});

struct CostBounds {
  double expected_sampled_exact = 0.0;  // dense trace formula, n-gated
  bool exact_available = false;
  double sampled_upper = 0.0;  // n (1 + lambda_bar / q0)
  double rereads_upper = 0.0;  // n ln(1 + alpha / q0)
};

// Analytic cost references for a trajectory down to q0. The dense branch
// evaluates Tr((q0 Id - L)^{-1} (q0 Id + W)) and refuses n > dense_cap.
CostBounds cost_bounds(const WeightedGraph& g, double q0,
                       std::int32_t dense_cap = 2000);

}  // namespace forest_spectra
