#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "forest_spectra/graph.hpp"
#include "forest_spectra/rng.hpp"

namespace forest_spectra {

// Walker/Vose alias table over K categories, O(K) build, O(1) sample.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  std::int32_t sample(Rng& rng) const {
    std::int32_t i = static_cast<std::int32_t>(rng.below(size_));
    return rng.uniform() < prob_[i] ? i : alias_[i];
  }
  std::int32_t size() const { return size_; }

  // Probability vector implied by the table (for exactness checks).
  std::vector<double> implied_probabilities() const;

 private:
  std::int32_t size_ = 0;
  std::vector<double> prob_;
  std::vector<std::int32_t> alias_;
};

// Per-node samplers over outgoing arrows. When a node carries a killing
// weight delta(x) > 0, a killing pseudo-arrow is appended and reported as
// kKillArrow.
class NeighborSampler {
 public:
  static constexpr std::int32_t kKillArrow = -1;

  explicit NeighborSampler(const WeightedGraph& g);

  // Neighbor y of x with probability w(x,y)/(w(x)+delta(x)), or kKillArrow
  // with probability delta(x)/(w(x)+delta(x)). Requires total_weight(x) > 0.
  std::int32_t sample(std::int32_t x, Rng& rng) const;

  std::vector<double> implied_probabilities(std::int32_t x) const {
    return tables_[x].implied_probabilities();
  }

 private:
  const WeightedGraph* graph_;
  std::vector<AliasTable> tables_;
};

}  // namespace forest_spectra
