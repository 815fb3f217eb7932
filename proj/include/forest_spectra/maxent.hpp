#pragma once

#include <span>
#include <vector>

namespace forest_spectra {

// Exponential-family density nu_beta(dy) on [a,b] proportional to
// exp(-sum_j beta_j y^j). Multipliers live in the affinely rescaled
// coordinate z = (y-a)/(b-a); for [a,b] = [0,1] they coincide with the
// y-multipliers.
struct MaxentModel {
  double a = 0.0, b = 1.0;
  int order = 0;
  std::vector<double> beta;  // rescaled-coordinate multipliers, size = order
  double log_partition = 0.0;
  bool converged = false;
  bool degenerate = false;  // singular Hessian / runaway multipliers
  int iterations = 0;

  // E[y^j] in original coordinates, j = 0..order (and above on request).
  double moment(int j) const;
  // nu_beta([xi, b]).
  double tail(double xi) const;
};

// E_{nu_beta}[y^j] on [a,b] for j = 0..max_power, beta given in the
// y-coordinate directly. result[0] is 1; the partition integral is written
// to *partition when non-null (exponent shifted by its minimum, so large
// beta cannot overflow).
std::vector<double> moment_integrals(std::span<const double> beta, double a,
                                     double b, int max_power,
                                     double* partition = nullptr);

// Newton descent on beta -> ln Xi_beta + sum_j beta_j m_j for target
// moments m_1..m_k (original coordinates). Stops when the moment residuals
// fall below 1e-8 relative or at max_iter; non-convergence is reported via
// the flag, not thrown. init may be empty (cold start at 0) or size k.
MaxentModel maxent_fit(std::span<const double> target_moments, double a,
                       double b, std::span<const double> init = {},
                       int max_iter = 50);

}  // namespace forest_spectra
