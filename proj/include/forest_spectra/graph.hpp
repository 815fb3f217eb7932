#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace forest_spectra {

// Raised on malformed input files or contract-violating data.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

struct GraphScalars {
  double alpha = 0.0;        // max_x w(x), edge weights only
  double lambda_bar = 0.0;   // (1/n) sum_x (w(x) + delta(x)) = (1/n) Tr(-L)
  double spectral_upper = 0.0;  // every eigenvalue of -L lies in [0, this]
};

struct Edge {
  std::int32_t u, v;
  double w;
};

// Immutable symmetric weighted graph with optional per-node killing weights
// delta(x) (zero for true Laplacians). Adjacency is CSR; safe to share
// across threads after construction.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  // Edges may repeat (weights are summed); u==v or negative weights throw.
  // kill may be empty (all-zero) or size n.
  static WeightedGraph from_edges(std::int32_t n, std::span<const Edge> edges,
                                  std::vector<double> kill = {});

  std::int32_t node_count() const { return n_; }
  std::int64_t edge_count() const { return m_; }

  std::span<const std::int32_t> neighbors(std::int32_t x) const {
    return {adj_.data() + offset_[x], adj_.data() + offset_[x + 1]};
  }
  std::span<const double> weights(std::int32_t x) const {
    return {wgt_.data() + offset_[x], wgt_.data() + offset_[x + 1]};
  }
  std::int32_t degree(std::int32_t x) const {
    return offset_[x + 1] - offset_[x];
  }

  double node_weight(std::int32_t x) const { return node_weight_[x]; }
  double kill_weight(std::int32_t x) const {
    return kill_.empty() ? 0.0 : kill_[x];
  }
  // w(x) + delta(x); the total rate leaving x in the stack representation.
  double total_weight(std::int32_t x) const {
    return node_weight_[x] + kill_weight(x);
  }
  bool has_killing() const { return has_killing_; }

  GraphScalars scalars() const;

  // FNV-1a over the structure; used to stamp outputs.
  std::uint64_t structure_hash() const;

 private:
  std::int32_t n_ = 0;
  std::int64_t m_ = 0;
  std::vector<std::int32_t> offset_;
  std::vector<std::int32_t> adj_;
  std::vector<double> wgt_;
  std::vector<double> node_weight_;
  std::vector<double> kill_;
  bool has_killing_ = false;
};

enum class GraphFormat { kEdgeList, kMatrixMarket };

struct LoadedGraph {
  WeightedGraph graph;
  // Original node labels, indexed by dense id; empty when input ids were
  // already dense integers.
  std::vector<std::string> labels;
};

// Edge list: whitespace-separated lines `u v [w]`, `#` comments, optional
// header `n <count>`, optional killing lines `k <node> <delta>`.
// Matrix market: coordinate real/pattern symmetric; diagonal entries are
// rejected (self-loops).
LoadedGraph load_graph(const std::string& path, GraphFormat format);
LoadedGraph parse_edge_list(std::istream& in, const std::string& name);
LoadedGraph parse_matrix_market_graph(std::istream& in,
                                      const std::string& name);

void write_edge_list(const WeightedGraph& g, const std::string& path);

}  // namespace forest_spectra
