#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace forest_spectra {

enum class RootKind : std::uint8_t {
  kNone = 0,  // not a root
  kMark = 1,  // rooted by a stop mark; can unfreeze later
  kKill = 2,  // rooted by a killing arrow; never unfreezes
};

// Successor-map representation of a rooted spanning forest.
// next[x] == kNoSuccessor marks a root; kind[x] tells which kind.
struct Forest {
  static constexpr std::int32_t kNoSuccessor = -1;

  std::vector<std::int32_t> next;
  std::vector<RootKind> kind;

  std::int32_t node_count() const {
    return static_cast<std::int32_t>(next.size());
  }
  bool is_root(std::int32_t x) const { return next[x] == kNoSuccessor; }

  // Follows successors to the root of x's tree (no memoization).
  std::int32_t root_of(std::int32_t x) const;

  // Acyclicity and representation consistency; used by debug audits.
  bool valid() const;
};

// Flat root lookup for one forest, built by path compression in O(n).
struct RootMap {
  std::vector<std::int32_t> root;
  // mark_rooted[x] == 1 iff the root of x's tree is a MARK-root.
  std::vector<std::uint8_t> mark_rooted;
};

RootMap compute_root_map(std::span<const std::int32_t> next,
                         std::span<const RootKind> kind);

inline RootMap compute_root_map(const Forest& f) {
  return compute_root_map(f.next, f.kind);
}

}  // namespace forest_spectra
