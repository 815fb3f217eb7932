#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "forest_spectra/graph.hpp"

namespace forest_spectra {

// Sparse real symmetric matrix; entries stored once per unordered pair
// (diagonal included).
struct SymmetricMatrix {
  std::int32_t n = 0;
  struct Entry {
    std::int32_t row, col;  // row <= col
    double value;
  };
  std::vector<Entry> entries;

  double diagonal(std::int32_t x) const;
  std::vector<double> dense_row_major() const;
};

SymmetricMatrix load_symmetric_matrix(const std::string& path);
SymmetricMatrix parse_matrix_market_symmetric(std::istream& in,
                                              const std::string& name);

// Smallest shift c >= 0 such that M' = M - c*Id is diagonally dominant
// with nonpositive diagonal: M'(x,x) <= -sum_{y!=x} |M'(x,y)|. Extra user
// margin can be added on top. Eigenvalues of -M' are those of -M plus c.
struct ShiftedMatrix {
  SymmetricMatrix matrix;
  double shift = 0.0;
};
ShiftedMatrix shift_to_dominant(const SymmetricMatrix& m,
                                double extra_shift = 0.0);

// M' with nonnegative off-diagonals and dominant diagonal becomes a
// sub-Laplacian graph: w(x,y) = M'(x,y), delta(x) = -M'(x,x) - sum w(x,y).
WeightedGraph make_sub_laplacian(const SymmetricMatrix& m_prime);

// Double cover: L1 on n nodes with |M'| off-diagonals, L2 on 2n nodes with
// the positive/negative parts split across the two sheets. Spectra satisfy
// 2*sigma_2 = sigma_1 + sigma(M').
struct CoverPair {
  WeightedGraph l1;
  WeightedGraph l2;
  double shift = 0.0;
};
CoverPair double_cover(const SymmetricMatrix& m_prime, double shift = 0.0);

// F = clamp(2*F2 - F1, 0, 1) pointwise; raw values preserved by the caller
// when needed.
std::vector<double> combine_cdfs(std::span<const double> f1,
                                 std::span<const double> f2);

// Pool-adjacent-violators pass: smallest non-decreasing sequence change.
std::vector<double> isotonic_non_decreasing(std::span<const double> v);

}  // namespace forest_spectra
