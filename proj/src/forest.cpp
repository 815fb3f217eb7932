#include "forest_spectra/forest.hpp"

namespace forest_spectra {

std::int32_t Forest::root_of(std::int32_t x) const {
  while (next[x] != kNoSuccessor) x = next[x];
  return x;
}

bool Forest::valid() const {
  const std::int32_t n = node_count();
  // Walk from each node; a walk longer than n steps means a cycle.
  for (std::int32_t x = 0; x < n; ++x) {
    std::int32_t y = x;
    std::int32_t steps = 0;
    while (next[y] != kNoSuccessor) {
      y = next[y];
      if (++steps > n) return false;
    }
    if (kind[y] == RootKind::kNone) return false;
  }
  for (std::int32_t x = 0; x < n; ++x)
    if (next[x] != kNoSuccessor && kind[x] != RootKind::kNone) return false;
  return true;
}

RootMap compute_root_map(std::span<const std::int32_t> next,
                         std::span<const RootKind> kind) {
  const std::int32_t n = static_cast<std::int32_t>(next.size());
  RootMap rm;
  rm.root.assign(n, -1);
  rm.mark_rooted.assign(n, 0);
  std::vector<std::int32_t> path;
  for (std::int32_t x = 0; x < n; ++x) {
    if (rm.root[x] >= 0) continue;
    std::int32_t y = x;
    path.clear();
    while (next[y] != Forest::kNoSuccessor && rm.root[y] < 0) {
      path.push_back(y);
      y = next[y];
    }
    std::int32_t r = rm.root[y] >= 0 ? rm.root[y] : y;
    rm.root[x] = r;
    for (std::int32_t p : path) rm.root[p] = r;
  }
  for (std::int32_t x = 0; x < n; ++x)
    rm.mark_rooted[x] = kind[rm.root[x]] == RootKind::kMark ? 1 : 0;
  return rm;
}

}  // namespace forest_spectra
