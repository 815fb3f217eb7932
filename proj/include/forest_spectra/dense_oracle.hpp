#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "forest_spectra/graph.hpp"

namespace forest_spectra {

// Dense validation oracle: full symmetric eigendecomposition of -L (or of
// a dense symmetric matrix given row-major). Gated by a size cap; this is
// O(n^3) and exists to check the Monte Carlo machinery, not to compete
// with it.
struct ExactSpectrum {
  std::vector<double> eigenvalues;  // ascending

  // F(q) = (1/n) #{lambda_j <= q}, with a hair of tolerance at ties.
  double cdf(double q) const;
  // (1/n) sum_j (q/(q+lambda_j))^k
  double rational_moment(double q, int k) const;
};

ExactSpectrum exact_spectrum(const WeightedGraph& g, std::int32_t cap = 4000);
ExactSpectrum exact_spectrum_dense(std::span<const double> sym_row_major,
                                   std::int32_t n, std::int32_t cap = 4000);

// Dense -L of a weighted graph (diag w(x)+delta(x), off-diag -w(x,y)),
// row-major.
std::vector<double> dense_neg_laplacian(const WeightedGraph& g);

}  // namespace forest_spectra
