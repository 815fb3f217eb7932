#include "forest_spectra/replicas.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "forest_spectra/alias.hpp"
#include "forest_spectra/sampler.hpp"

namespace forest_spectra {

QGrid QGrid::make(double q0, double alpha, double eps0) {
  if (!(alpha > 0.0)) throw std::invalid_argument("make_grid: alpha must be > 0");
  if (!(q0 > 0.0 && q0 < 2.0 * alpha))
    throw std::invalid_argument("make_grid: need 0 < q0 < 2*alpha");
  if (!(eps0 > 0.0 && eps0 <= 1.0))
    throw std::invalid_argument("make_grid: need 0 < eps0 <= 1");
  QGrid grid;
  grid.q0 = q0;
  grid.eps0 = eps0;
  const auto steps = static_cast<std::int64_t>(std::ceil(1.0 / eps0));
  // r = exp(ln(2a/q0)/N); equals exp(eps0 ln(2a/q0)) whenever 1/eps0 is an
  // integer, and always lands the last point on 2*alpha exactly.
  const double log_span = std::log(2.0 * alpha / q0);
  grid.ratio = std::exp(log_span / static_cast<double>(steps));
  grid.values.resize(steps + 1);
  for (std::int64_t i = 0; i <= steps; ++i)
    grid.values[i] = q0 * std::exp(log_span * static_cast<double>(i) /
                                   static_cast<double>(steps));
  grid.values.back() = 2.0 * alpha;
  return grid;
}

std::vector<std::int32_t> xi_sizes(std::span<const RootMap* const> forests,
                                   bool killing_mode) {
  const std::int32_t l = static_cast<std::int32_t>(forests.size());
  if (l < 1) throw std::invalid_argument("xi_sizes: need at least one forest");
  const std::int32_t n = static_cast<std::int32_t>(forests[0]->root.size());
  for (const RootMap* f : forests)
    if (static_cast<std::int32_t>(f->root.size()) != n)
      throw std::invalid_argument("xi_sizes: node count mismatch");
  std::vector<std::int32_t> counts(l, 0);
  for (std::int32_t x = 0; x < n; ++x) {
    std::int32_t y = x;
    for (std::int32_t k = 0; k < l; ++k) {
      if (killing_mode && !forests[k]->mark_rooted[y]) break;
      y = forests[k]->root[y];
      if (y == x) ++counts[k];
    }
  }
  return counts;
}

MomentEstimates estimate_moments(const WeightedGraph& g, const QGrid& grid,
                                 std::int32_t l, std::int32_t s,
                                 std::uint64_t base_seed,
                                 std::int32_t threads) {
  if (l < 1) throw std::invalid_argument("estimate_moments: l >= 1 required");
  if (s < 2) throw std::invalid_argument("estimate_moments: s >= 2 required");
  const std::int32_t n = g.node_count();
  const auto nq = static_cast<std::int32_t>(grid.values.size());
  const bool killing = g.has_killing();
  NeighborSampler ns(g);

  // counts[group][qi * l + k]
  std::vector<std::vector<std::int32_t>> counts(s);
  auto run_group = [&](std::int32_t j) {
    std::vector<Trajectory> trajs;
    trajs.reserve(l);
    for (std::int32_t r = 0; r < l; ++r) {
      Rng rng = Rng::stream(base_seed, static_cast<std::uint64_t>(j),
                            static_cast<std::uint64_t>(r));
      trajs.push_back(coupled_trajectory(g, ns, grid.values.front(),
                                         grid.values.back(), grid.values,
                                         rng));
    }
    auto& out = counts[j];
    out.resize(static_cast<std::size_t>(nq) * l);
    std::vector<const RootMap*> maps(l);
    for (std::int32_t qi = 0; qi < nq; ++qi) {
      for (std::int32_t r = 0; r < l; ++r)
        maps[r] = &trajs[r].snapshots[qi].roots;
      auto xs = xi_sizes(maps, killing);
      for (std::int32_t k = 0; k < l; ++k) out[qi * l + k] = xs[k];
    }
  };

  if (threads <= 1) {
    for (std::int32_t j = 0; j < s; ++j) run_group(j);
  } else {
    std::atomic<std::int32_t> cursor{0};
    auto worker = [&] {
      for (;;) {
        std::int32_t j = cursor.fetch_add(1);
        if (j >= s) return;
        run_group(j);
      }
    };
    std::vector<std::thread> pool;
    for (std::int32_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  MomentEstimates est;
  est.grid = grid;
  est.replicas = l;
  est.samples = s;
  est.node_count = n;
  est.mean.assign(l, std::vector<double>(nq, 0.0));
  est.stderr_.assign(l, std::vector<double>(nq, 0.0));
  est.count_mean.assign(l, std::vector<double>(nq, 0.0));
  est.count_var.assign(l, std::vector<double>(nq, 0.0));
  for (std::int32_t qi = 0; qi < nq; ++qi) {
    for (std::int32_t k = 0; k < l; ++k) {
      double sum = 0.0;
      for (std::int32_t j = 0; j < s; ++j) sum += counts[j][qi * l + k];
      const double mean_count = sum / s;
      double ss = 0.0;
      for (std::int32_t j = 0; j < s; ++j) {
        const double d = counts[j][qi * l + k] - mean_count;
        ss += d * d;
      }
      const double var_count = ss / (s - 1);
      est.count_mean[k][qi] = mean_count;
      est.count_var[k][qi] = var_count;
      est.mean[k][qi] = mean_count / n;
      est.stderr_[k][qi] = std::sqrt(var_count / s) / n;
    }
  }
  return est;
}

VarianceReport group_variance_check(const MomentEstimates& est) {
  VarianceReport rep;
  const auto nq = static_cast<std::int32_t>(est.grid.values.size());
  for (std::int32_t qi = 0; qi < nq; ++qi)
    for (std::int32_t k = 0; k < est.replicas; ++k)
      if (est.count_var[k][qi] > 1.2 * est.count_mean[k][qi])
        rep.violations.push_back(
            {qi, k + 1, est.count_var[k][qi], est.count_mean[k][qi]});
  return rep;
}

}  // namespace forest_spectra
