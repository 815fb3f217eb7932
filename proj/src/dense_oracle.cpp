#include "forest_spectra/dense_oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace forest_spectra {

double ExactSpectrum::cdf(double q) const {
  const double tol = 1e-10 * std::max(1.0, std::abs(q)) + 1e-12;
  auto it = std::upper_bound(eigenvalues.begin(), eigenvalues.end(), q + tol);
  return static_cast<double>(it - eigenvalues.begin()) / eigenvalues.size();
}

double ExactSpectrum::rational_moment(double q, int k) const {
  double acc = 0.0;
  for (double lam : eigenvalues) acc += std::pow(q / (q + lam), k);
  return acc / eigenvalues.size();
}

std::vector<double> dense_neg_laplacian(const WeightedGraph& g) {
  const std::int32_t n = g.node_count();
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  for (std::int32_t x = 0; x < n; ++x) {
    m[static_cast<std::size_t>(x) * n + x] = g.total_weight(x);
    auto nb = g.neighbors(x);
    auto ws = g.weights(x);
    for (std::size_t i = 0; i < nb.size(); ++i)
      m[static_cast<std::size_t>(x) * n + nb[i]] = -ws[i];
  }
  return m;
}

ExactSpectrum exact_spectrum_dense(std::span<const double> sym_row_major,
                                   std::int32_t n, std::int32_t cap) {
  if (n > cap)
    throw InputError("dense oracle refused: n=" + std::to_string(n) +
                     " exceeds cap " + std::to_string(cap));
  Eigen::MatrixXd m(n, n);
  for (std::int32_t i = 0; i < n; ++i)
    for (std::int32_t j = 0; j < n; ++j)
      m(i, j) = sym_row_major[static_cast<std::size_t>(i) * n + j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dense eigendecomposition failed");
  ExactSpectrum out;
  out.eigenvalues.assign(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + n);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

ExactSpectrum exact_spectrum(const WeightedGraph& g, std::int32_t cap) {
  return exact_spectrum_dense(dense_neg_laplacian(g), g.node_count(), cap);
}

}  // namespace forest_spectra
