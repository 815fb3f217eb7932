#include "forest_spectra/sampler.hpp"

#include <Eigen/Dense>
#include <cassert>
#include <stdexcept>

namespace forest_spectra {

namespace {

// Mutable state of one stack-reading process. Both the fixed-q sampler and
// the coupled trajectory drive this; the trajectory additionally maintains
// children lists so the tree of an unfreezing root can be collected without
// scanning all nodes.
class Process {
 public:
  Process(const WeightedGraph& g, const NeighborSampler& ns, Rng& rng,
          bool track_children)
      : g_(g), ns_(ns), rng_(rng), track_children_(track_children) {
    const std::int32_t n = g.node_count();
    next_.assign(n, Forest::kNoSuccessor);
    kind_.assign(n, RootKind::kNone);
    in_forest_.assign(n, 0);
    tagged_.assign(n, 0);
    if (track_children_) {
      children_.assign(n, {});
      child_pos_.assign(n, -1);
    }
  }

  // Algorithm-1 pass: loop-erased walks from every node at rate q.
  void wilson_pass(double q) {
    q_ = q;
    for (std::int32_t i = 0; i < g_.node_count(); ++i) walk(i, -1);
  }

  // One unfreezing episode: root `u` leaves the frozen set at rate q_event,
  // its tree is re-read in Wilson's order, stored arrows replay once.
  void episode(std::int32_t u, double q_event) {
    q_ = q_event;
    tree_.clear();
    collect_tree(u);
    for (std::int32_t x : tree_) {
      in_forest_[x] = 0;
      tagged_[x] = 1;
    }
    // Reactivation: reveal the arrow half of the level whose mark froze u.
    // Its mark was already counted in S when u rooted.
    kind_[u] = RootKind::kNone;
    std::int32_t fresh_tag = -1;
    std::int32_t a = ns_.sample(u, rng_);
    if (a == NeighborSampler::kKillArrow) {
      tagged_[u] = 0;
      kind_[u] = RootKind::kKill;
      in_forest_[u] = 1;
    } else {
      set_next(u, a);
      fresh_tag = u;
    }
    for (std::int32_t i : tree_) walk(i, fresh_tag);
  }

  bool audit_episode() const {
    for (std::int32_t x : tree_)
      if (!in_forest_[x] || tagged_[x]) return false;
    return forest().valid();
  }

  Forest forest() const {
    Forest f;
    f.next = next_;
    f.kind = kind_;
    return f;
  }
  RootMap root_map() const { return compute_root_map(next_, kind_); }

  UnfreezeQueue& queue() { return queue_; }
  CostStats& cost() { return cost_; }

 private:
  void set_next(std::int32_t x, std::int32_t y) {
    std::int32_t old = next_[x];
    if (old == y) return;
    if (track_children_) {
      if (old != Forest::kNoSuccessor) {
        auto& c = children_[old];
        std::int32_t pos = child_pos_[x];
        std::int32_t last = c.back();
        c[pos] = last;
        child_pos_[last] = pos;
        c.pop_back();
      }
      if (y != Forest::kNoSuccessor) {
        children_[y].push_back(x);
        child_pos_[x] = static_cast<std::int32_t>(children_[y].size()) - 1;
      }
    }
    next_[x] = y;
  }

  void collect_tree(std::int32_t root) {
    tree_.push_back(root);
    for (std::size_t head = 0; head < tree_.size(); ++head)
      for (std::int32_t c : children_[tree_[head]]) tree_.push_back(c);
  }

  void walk(std::int32_t start, std::int32_t fresh_tag) {
    std::int32_t u = start;
    while (!in_forest_[u]) {
      if (tagged_[u]) {
        tagged_[u] = 0;
        if (u != fresh_tag) ++cost_.rereads;
        u = next_[u];
        continue;
      }
      const double mark = rng_.uniform();
      ++cost_.sampled;
      const double w = g_.total_weight(u);
      // Mark <= q/(q+w)  <=>  q_x <= q with q_x = mark*w/(1-mark); computing
      // q_x first keeps the rooting test and the queue threshold bit-equal.
      const double qx = w > 0.0 ? mark * w / (1.0 - mark) : 0.0;
      if (qx <= q_) {
        in_forest_[u] = 1;
        set_next(u, Forest::kNoSuccessor);
        kind_[u] = RootKind::kMark;
        queue_.push({qx, u});
      } else {
        std::int32_t a = ns_.sample(u, rng_);
        if (a == NeighborSampler::kKillArrow) {
          in_forest_[u] = 1;
          set_next(u, Forest::kNoSuccessor);
          kind_[u] = RootKind::kKill;
        } else {
          kind_[u] = RootKind::kNone;
          set_next(u, a);
          u = a;
        }
      }
    }
    u = start;
    while (!in_forest_[u]) {
      in_forest_[u] = 1;
      u = next_[u];
    }
  }

  const WeightedGraph& g_;
  const NeighborSampler& ns_;
  Rng& rng_;
  bool track_children_;
  double q_ = 0.0;
  std::vector<std::int32_t> next_;
  std::vector<RootKind> kind_;
  std::vector<std::uint8_t> in_forest_;
  std::vector<std::uint8_t> tagged_;
  std::vector<std::vector<std::int32_t>> children_;
  std::vector<std::int32_t> child_pos_;
  std::vector<std::int32_t> tree_;
  UnfreezeQueue queue_;
  CostStats cost_;
};

}  // namespace

WilsonResult wilson_sample(const WeightedGraph& g, const NeighborSampler& ns,
                           double q, Rng& rng) {
  if (!(q > 0.0)) throw std::invalid_argument("wilson_sample: q must be > 0");
  Process p(g, ns, rng, /*track_children=*/false);
  p.wilson_pass(q);
  WilsonResult r;
  r.forest = p.forest();
  r.queue = std::move(p.queue());
  r.cost = p.cost();
  return r;
}

Trajectory coupled_trajectory(const WeightedGraph& g,
                              const NeighborSampler& ns, double q_min,
                              double q_max, std::span<const double> grid,
                              Rng& rng, const TrajectoryOptions& opt) {
  if (!(q_min > 0.0))
    throw std::invalid_argument("coupled_trajectory: q_min must be > 0");
  if (!(q_max >= q_min))
    throw std::invalid_argument("coupled_trajectory: q_max < q_min");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < q_min || grid[i] > q_max)
      throw std::invalid_argument("coupled_trajectory: grid value outside range");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw std::invalid_argument("coupled_trajectory: grid not increasing");
  }

  Trajectory t;
  t.q_min = q_min;
  t.q_max = q_max;
  t.snapshots.resize(grid.size());
  if (opt.keep_grid_forests) t.grid_forests.resize(grid.size());

  Process p(g, ns, rng, /*track_children=*/true);
  p.wilson_pass(q_max);
  if (opt.keep_qmax_forest) t.forest_at_qmax = p.forest();

  // Grid values are visited from the top; grid point g sees the forest
  // after all events with threshold > g.
  std::int64_t gi = static_cast<std::int64_t>(grid.size()) - 1;
  auto snapshot_down_to = [&](double q_event) {
    while (gi >= 0 && grid[gi] >= q_event) {
      t.snapshots[gi].q = grid[gi];
      t.snapshots[gi].roots = p.root_map();
      if (opt.keep_grid_forests) t.grid_forests[gi] = p.forest();
      --gi;
    }
  };

  while (!p.queue().empty()) {
    UnfreezeEntry e = p.queue().top();
    if (e.q <= q_min) break;
    snapshot_down_to(e.q);
    p.queue().pop();
    if (opt.keep_events) t.events.push_back({e.q, e.node});
    p.episode(e.node, e.q);
    if (opt.audit && !p.audit_episode())
      throw std::logic_error("coupled_trajectory: forest audit failed");
  }
  snapshot_down_to(q_min);  // remaining grid values see the final forest
  t.cost = p.cost();
  return t;
}

CostBounds cost_bounds(const WeightedGraph& g, double q0,
                       std::int32_t dense_cap) {
  if (!(q0 > 0.0)) throw std::invalid_argument("cost_bounds: q0 must be > 0");
  const std::int32_t n = g.node_count();
  GraphScalars s = g.scalars();
  CostBounds b;
  b.sampled_upper = n * (1.0 + s.lambda_bar / q0);
  b.rereads_upper = n * std::log1p(s.alpha / q0);
  if (n <= dense_cap) {
    // Tr((q0 Id - L)^{-1} (q0 Id + W)) with W = diag(w(x) + delta(x)).
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    for (std::int32_t x = 0; x < n; ++x) {
      A(x, x) = q0 + g.total_weight(x);
      B(x, x) = q0 + g.total_weight(x);
      auto nb = g.neighbors(x);
      auto ws = g.weights(x);
      for (std::size_t i = 0; i < nb.size(); ++i) A(x, nb[i]) -= ws[i];
    }
    b.expected_sampled_exact = A.llt().solve(B).trace();
    b.exact_available = true;
  }
  return b;
}

}  // namespace forest_spectra
