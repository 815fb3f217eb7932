#include "forest_spectra/alias.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace forest_spectra {

AliasTable::AliasTable(std::span<const double> weights) {
  size_ = static_cast<std::int32_t>(weights.size());
  if (size_ == 0) throw std::invalid_argument("alias table needs weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("alias table weight negative or non-finite");
    total += w;
  }
  if (!(total > 0.0))
    throw std::invalid_argument("alias table total weight must be positive");

  prob_.resize(size_);
  alias_.assign(size_, 0);
  std::vector<double> scaled(size_);
  std::vector<std::int32_t> small, large;
  for (std::int32_t i = 0; i < size_; ++i) {
    scaled[i] = weights[i] * size_ / total;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    std::int32_t s = small.back(), l = large.back();
    small.pop_back();
    large.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (std::int32_t i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  for (std::int32_t i : small) {  // leftover from rounding
    prob_[i] = 1.0;
    alias_[i] = i;
  }
}

std::vector<double> AliasTable::implied_probabilities() const {
  std::vector<double> p(size_, 0.0);
  for (std::int32_t i = 0; i < size_; ++i) {
    p[i] += prob_[i] / size_;
    p[alias_[i]] += (1.0 - prob_[i]) / size_;
  }
  return p;
}

NeighborSampler::NeighborSampler(const WeightedGraph& g) : graph_(&g) {
  tables_.resize(g.node_count());
  std::vector<double> w;
  for (std::int32_t x = 0; x < g.node_count(); ++x) {
    if (g.total_weight(x) <= 0.0) continue;  // never sampled from
    auto ws = g.weights(x);
    w.assign(ws.begin(), ws.end());
    if (g.kill_weight(x) > 0.0) w.push_back(g.kill_weight(x));
    tables_[x] = AliasTable(w);
  }
}

std::int32_t NeighborSampler::sample(std::int32_t x, Rng& rng) const {
  assert(graph_->total_weight(x) > 0.0);
  std::int32_t i = tables_[x].sample(rng);
  if (i >= graph_->degree(x)) return kKillArrow;
  return graph_->neighbors(x)[i];
}

}  // namespace forest_spectra
