#include "forest_spectra/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "forest_spectra/rng.hpp"

namespace forest_spectra {

namespace {

WeightedGraph from_pairs(std::int32_t n,
                         const std::vector<std::pair<std::int32_t, std::int32_t>>& pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (auto [u, v] : pairs) edges.push_back({u, v, 1.0});
  return WeightedGraph::from_edges(n, edges);
}

}  // namespace

WeightedGraph gen_er(std::int32_t n, double p, std::uint64_t seed) {
  if (n < 1 || p < 0.0 || p > 1.0)
    throw InputError("er: need n >= 1 and p in [0,1]");
  Rng rng = Rng::stream(seed, 0x4552, 0);  // family-tagged stream
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  for (std::int32_t u = 0; u < n; ++u)
    for (std::int32_t v = u + 1; v < n; ++v)
      if (rng.uniform() < p) pairs.emplace_back(u, v);
  return from_pairs(n, pairs);
}

WeightedGraph gen_er_mean_degree(std::int32_t n, double degree,
                                 std::uint64_t seed) {
  if (n < 2 || degree < 0.0 || degree > n - 1)
    throw InputError("er_mean_degree: need 0 <= degree <= n-1");
  return gen_er(n, degree / (n - 1), seed);
}

WeightedGraph gen_ba(std::int32_t n, std::int32_t m, std::uint64_t seed) {
  if (m < 1 || n < m + 1) throw InputError("ba: need n >= m+1, m >= 1");
  Rng rng = Rng::stream(seed, 0x4241, 0);
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  // Seed clique on m+1 nodes, then preferential attachment via the
  // endpoint list.
  std::vector<std::int32_t> endpoints;
  for (std::int32_t u = 0; u <= m; ++u)
    for (std::int32_t v = u + 1; v <= m; ++v) {
      pairs.emplace_back(u, v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  std::vector<std::int32_t> chosen;
  for (std::int32_t v = m + 1; v < n; ++v) {
    chosen.clear();
    while (static_cast<std::int32_t>(chosen.size()) < m) {
      std::int32_t pick =
          endpoints[rng.below(static_cast<std::uint32_t>(endpoints.size()))];
      if (std::find(chosen.begin(), chosen.end(), pick) == chosen.end())
        chosen.push_back(pick);
    }
    for (std::int32_t u : chosen) {
      pairs.emplace_back(u, v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  return from_pairs(n, pairs);
}

WeightedGraph gen_sbm(std::int32_t n, std::int32_t communities, double p_in,
                      double p_out, std::uint64_t seed) {
  if (communities < 1 || n < communities)
    throw InputError("sbm: need 1 <= communities <= n");
  if (p_in < 0 || p_in > 1 || p_out < 0 || p_out > 1)
    throw InputError("sbm: probabilities must be in [0,1]");
  Rng rng = Rng::stream(seed, 0x53424d, 0);
  // Equal-size blocks, remainder spread over the first ones.
  std::vector<std::int32_t> block(n);
  const std::int32_t base = n / communities, extra = n % communities;
  std::int32_t node = 0;
  for (std::int32_t c = 0; c < communities; ++c) {
    const std::int32_t size = base + (c < extra ? 1 : 0);
    for (std::int32_t i = 0; i < size; ++i) block[node++] = c;
  }
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  for (std::int32_t u = 0; u < n; ++u)
    for (std::int32_t v = u + 1; v < n; ++v) {
      const double p = block[u] == block[v] ? p_in : p_out;
      if (rng.uniform() < p) pairs.emplace_back(u, v);
    }
  return from_pairs(n, pairs);
}

WeightedGraph gen_sensor(std::int32_t n, std::int32_t k_nearest,
                         std::uint64_t seed) {
  if (n < 2 || k_nearest < 1 || k_nearest >= n)
    throw InputError("sensor: need 1 <= k < n");
  Rng rng = Rng::stream(seed, 0x53454e, 0);
  std::vector<double> x(n), y(n);
  for (std::int32_t i = 0; i < n; ++i) {
    x[i] = rng.uniform();
    y[i] = rng.uniform();
  }
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  std::vector<std::pair<double, std::int32_t>> dist(n);
  for (std::int32_t u = 0; u < n; ++u) {
    for (std::int32_t v = 0; v < n; ++v) {
      const double dx = x[u] - x[v], dy = y[u] - y[v];
      dist[v] = {dx * dx + dy * dy, v};
    }
    std::nth_element(dist.begin(), dist.begin() + k_nearest, dist.end());
    std::partial_sort(dist.begin(), dist.begin() + k_nearest + 1,
                      dist.begin() + k_nearest + 1);
    for (std::int32_t i = 1; i <= k_nearest; ++i) {
      const std::int32_t v = dist[i].second;
      pairs.emplace_back(std::min(u, v), std::max(u, v));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return from_pairs(n, pairs);
}

WeightedGraph gen_comet(std::int32_t branches, std::int32_t tail) {
  if (branches < 0 || tail < 0) throw InputError("comet: negative sizes");
  const std::int32_t n = 1 + branches + tail;
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  for (std::int32_t i = 1; i <= branches; ++i) pairs.emplace_back(0, i);
  std::int32_t prev = 0;
  for (std::int32_t i = 0; i < tail; ++i) {
    const std::int32_t node = branches + 1 + i;
    pairs.emplace_back(prev, node);
    prev = node;
  }
  return from_pairs(n, pairs);
}

WeightedGraph gen_torus(std::int32_t width, std::int32_t height) {
  if (width < 3 || height < 3)
    throw InputError("torus: need width, height >= 3");
  auto id = [&](std::int32_t i, std::int32_t j) { return i * height + j; };
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  for (std::int32_t i = 0; i < width; ++i)
    for (std::int32_t j = 0; j < height; ++j) {
      pairs.emplace_back(id(i, j), id((i + 1) % width, j));
      pairs.emplace_back(id(i, j), id(i, (j + 1) % height));
    }
  return from_pairs(width * height, pairs);
}

WeightedGraph gen_star(std::int32_t n) {
  if (n < 1) throw InputError("star: need n >= 1");
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  for (std::int32_t i = 1; i < n; ++i) pairs.emplace_back(0, i);
  return from_pairs(n, pairs);
}

WeightedGraph gen_path(std::int32_t n) {
  if (n < 1) throw InputError("path: need n >= 1");
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  for (std::int32_t i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
  return from_pairs(n, pairs);
}

WeightedGraph gen_complete(std::int32_t n) {
  if (n < 1) throw InputError("complete: need n >= 1");
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  for (std::int32_t u = 0; u < n; ++u)
    for (std::int32_t v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  return from_pairs(n, pairs);
}

WeightedGraph generate_graph(const GeneratorSpec& s) {
  if (s.family == "er") return gen_er(s.n, s.p, s.seed);
  if (s.family == "er_mean_degree")
    return gen_er_mean_degree(s.n, s.degree, s.seed);
  if (s.family == "ba") return gen_ba(s.n, s.m, s.seed);
  if (s.family == "sbm")
    return gen_sbm(s.n, s.communities, s.p_in, s.p_out, s.seed);
  if (s.family == "sensor") return gen_sensor(s.n, s.k_nearest, s.seed);
  if (s.family == "comet") return gen_comet(s.branches, s.tail);
  if (s.family == "torus") return gen_torus(s.width, s.height);
  if (s.family == "star") return gen_star(s.n);
  if (s.family == "path") return gen_path(s.n);
  if (s.family == "complete") return gen_complete(s.n);
  throw InputError("unknown graph family '" + s.family + "'");
}

}  // namespace forest_spectra
