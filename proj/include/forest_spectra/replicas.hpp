#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "forest_spectra/forest.hpp"
#include "forest_spectra/graph.hpp"

namespace forest_spectra {

// Geometric rate grid q_i = q0 * r^i, i = 0..N with N = ceil(1/eps0) and r
// chosen so that q_N = 2*alpha exactly.
struct QGrid {
  double q0 = 0.0;
  double eps0 = 0.0;
  double ratio = 0.0;
  std::vector<double> values;

  static QGrid make(double q0, double alpha, double eps0);
};

// Sizes |xi_q^k| for k = 1..l from the root maps of l independent forests
// at the same q. In killing mode (sub-Laplacian runs) a chain is counted
// only while every visited root is a MARK-root.
std::vector<std::int32_t> xi_sizes(std::span<const RootMap* const> forests,
                                   bool killing_mode);

struct MomentEstimates {
  QGrid grid;
  std::int32_t replicas = 0;  // l
  std::int32_t samples = 0;   // s
  std::int32_t node_count = 0;
  // Indexed [k-1][grid index]; mean in [0,1], stderr over the s groups.
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> stderr_;
  // Sample mean/variance of the raw counts |xi_q^k| across groups.
  std::vector<std::vector<double>> count_mean;
  std::vector<std::vector<double>> count_var;
};

// Runs s independent groups of l coupled trajectories over the grid range
// and averages |xi_q^k|/n. Work is split across `threads` workers; group
// results land in indexed slots, so the output is bit-identical for any
// worker count.
MomentEstimates estimate_moments(const WeightedGraph& g, const QGrid& grid,
                                 std::int32_t l, std::int32_t s,
                                 std::uint64_t base_seed,
                                 std::int32_t threads = 1);

struct VarianceViolation {
  std::int32_t grid_index;
  std::int32_t k;
  double variance;
  double mean;
};

struct VarianceReport {
  std::vector<VarianceViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks Var(|xi_q^k|) <= 1.2 * E[|xi_q^k|] on the sampled groups
// (report-only; requires s >= 30 for the variance estimate to make sense).
VarianceReport group_variance_check(const MomentEstimates& est);

}  // namespace forest_spectra
