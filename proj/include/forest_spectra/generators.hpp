#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forest_spectra/graph.hpp"

namespace forest_spectra {

// Benchmark graph families. All unweighted (weight 1), deterministic per
// seed.
WeightedGraph gen_er(std::int32_t n, double p, std::uint64_t seed);
WeightedGraph gen_er_mean_degree(std::int32_t n, double degree,
                                 std::uint64_t seed);
WeightedGraph gen_ba(std::int32_t n, std::int32_t m, std::uint64_t seed);
WeightedGraph gen_sbm(std::int32_t n, std::int32_t communities, double p_in,
                      double p_out, std::uint64_t seed);
WeightedGraph gen_sensor(std::int32_t n, std::int32_t k_nearest,
                         std::uint64_t seed);
WeightedGraph gen_comet(std::int32_t branches, std::int32_t tail);
WeightedGraph gen_torus(std::int32_t width, std::int32_t height);
WeightedGraph gen_star(std::int32_t n);
WeightedGraph gen_path(std::int32_t n);
WeightedGraph gen_complete(std::int32_t n);

struct GeneratorSpec {
  std::string family;
  std::int32_t n = 0;
  double p = -1.0;
  double degree = -1.0;
  std::int32_t m = 0;
  std::int32_t communities = 0;
  double p_in = -1.0, p_out = -1.0;
  std::int32_t k_nearest = 0;
  std::int32_t branches = 0, tail = 0;
  std::int32_t width = 0, height = 0;
  std::uint64_t seed = 0;
};

WeightedGraph generate_graph(const GeneratorSpec& spec);

}  // namespace forest_spectra
