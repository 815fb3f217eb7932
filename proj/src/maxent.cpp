#include "forest_spectra/maxent.hpp"

#include <cmath>
#include <stdexcept>

namespace forest_spectra {

namespace {

constexpr int kPanels = 8;
constexpr int kNodesPerPanel = 32;

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Nodes/weights by Newton iteration from the Chebyshev initial guess.
const GaussLegendre& gl32() {
  static const GaussLegendre rule = [] {
    const int n = kNodesPerPanel;
    GaussLegendre r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        // Legendre P_n and derivative by upward recurrence.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      r.nodes[i] = x;
      r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

double poly_at(std::span<const double> beta, double y) {
  double acc = 0.0;
  for (std::size_t j = beta.size(); j-- > 0;) acc = (acc + beta[j]) * y;
  return acc;  // sum_j beta_j y^(j+1), beta_j multiplies y^{j+1}
}

// Raw integrals I_j = int_lo^hi y^j exp(-(g(y) - shift)) dy where
// g(y) = sum beta_j y^j and shift = min g over the quadrature nodes.
struct RawIntegrals {
  std::vector<double> integral;  // j = 0..max_power
  double shift = 0.0;
};

RawIntegrals raw_integrals(std::span<const double> beta, double lo, double hi,
                           int max_power) {
  const GaussLegendre& rule = gl32();
  const int total = kPanels * kNodesPerPanel;
  std::vector<double> ys(total), gs(total), ws(total);
  int idx = 0;
  double gmin = HUGE_VAL;
  for (int p = 0; p < kPanels; ++p) {
    const double pa = lo + (hi - lo) * p / kPanels;
    const double pb = lo + (hi - lo) * (p + 1) / kPanels;
    const double half = 0.5 * (pb - pa), mid = 0.5 * (pa + pb);
    for (int i = 0; i < kNodesPerPanel; ++i, ++idx) {
      ys[idx] = mid + half * rule.nodes[i];
      ws[idx] = half * rule.weights[i];
      gs[idx] = poly_at(beta, ys[idx]);
      gmin = std::min(gmin, gs[idx]);
    }
  }
  RawIntegrals out;
  out.shift = gmin;
  out.integral.assign(max_power + 1, 0.0);
  for (int i = 0; i < total; ++i) {
    const double density = ws[i] * std::exp(-(gs[i] - gmin));
    double pw = 1.0;
    for (int j = 0; j <= max_power; ++j) {
      out.integral[j] += density * pw;
      pw *= ys[i];
    }
  }
  return out;
}

}  // namespace

std::vector<double> moment_integrals(std::span<const double> beta, double a,
                                     double b, int max_power,
                                     double* partition) {
  if (!(b > a)) throw std::invalid_argument("moment_integrals: need a < b");
  for (double v : beta)
    if (!std::isfinite(v))
      throw std::invalid_argument("moment_integrals: non-finite beta");
  RawIntegrals raw = raw_integrals(beta, a, b, max_power);
  if (partition) *partition = raw.integral[0] * std::exp(-raw.shift);
  std::vector<double> m(max_power + 1);
  for (int j = 0; j <= max_power; ++j) m[j] = raw.integral[j] / raw.integral[0];
  m[0] = 1.0;
  return m;
}

double MaxentModel::moment(int j) const {
  // Rescaled moments, then binomially mapped back to y = a + (b-a) z.
  std::vector<double> mz = moment_integrals(beta, 0.0, 1.0, j);
  double acc = 0.0;
  double width = b - a;
  for (int i = 0; i <= j; ++i) {
    double c = 1.0;
    for (int t = 1; t <= i; ++t) c = c * (j - i + t) / t;
    acc += c * std::pow(a, j - i) * std::pow(width, i) * mz[i];
  }
  return acc;
}

double MaxentModel::tail(double xi) const {
  const double z = (xi - a) / (b - a);
  if (z <= 0.0) return 1.0;
  if (z >= 1.0) return 0.0;
  RawIntegrals full = raw_integrals(beta, 0.0, 1.0, 0);
  RawIntegrals part = raw_integrals(beta, z, 1.0, 0);
  // Same integrand, different shifts.
  const double r = part.integral[0] * std::exp(-(part.shift - full.shift)) /
                   full.integral[0];
  return std::min(1.0, std::max(0.0, r));
}

MaxentModel maxent_fit(std::span<const double> target_moments, double a,
                       double b, std::span<const double> init, int max_iter) {
  if (!(b > a)) throw std::invalid_argument("maxent_fit: need a < b");
  const int k = static_cast<int>(target_moments.size());
  if (k < 1) throw std::invalid_argument("maxent_fit: need at least one moment");
  if (!init.empty() && static_cast<int>(init.size()) != k)
    throw std::invalid_argument("maxent_fit: init size mismatch");

  // Work on [0,1]: transform target moments of y to moments of
  // z = (y-a)/(b-a).
  const double width = b - a;
  std::vector<double> tz(k);
  std::vector<double> my(k + 1);
  my[0] = 1.0;
  for (int j = 1; j <= k; ++j) my[j] = target_moments[j - 1];
  for (int j = 1; j <= k; ++j) {
    double acc = 0.0;
    for (int i = 0; i <= j; ++i) {
      double c = 1.0;
      for (int t = 1; t <= i; ++t) c = c * (j - i + t) / t;
      acc += c * std::pow(-a, j - i) * my[i];
    }
    tz[j - 1] = acc / std::pow(width, j);
  }

  MaxentModel model;
  model.a = a;
  model.b = b;
  model.order = k;
  model.beta.assign(init.begin(), init.end());
  if (model.beta.empty()) model.beta.assign(k, 0.0);

  auto objective = [&](const std::vector<double>& beta, double& log_xi) {
    RawIntegrals raw = raw_integrals(beta, 0.0, 1.0, 0);
    log_xi = std::log(raw.integral[0]) - raw.shift;
    double f = log_xi;
    for (int j = 0; j < k; ++j) f += beta[j] * tz[j];
    return f;
  };

  double log_xi = 0.0;
  double f = objective(model.beta, log_xi);
  const double grad_tol = 1e-8;
  int it = 0;
  for (; it < max_iter; ++it) {
    std::vector<double> mom = moment_integrals(model.beta, 0.0, 1.0, 2 * k);
    // gradient_j = m_hat_j - E[z^j]; relative convergence test
    std::vector<double> grad(k);
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
      grad[j] = tz[j] - mom[j + 1];
      worst = std::max(worst,
                       std::abs(grad[j]) / std::max(std::abs(tz[j]), 1e-3));
    }
    if (worst <= grad_tol) {
      model.converged = true;
      break;
    }
    // Hessian of ln Xi: covariance of (z, ..., z^k)
    std::vector<std::vector<double>> h(k, std::vector<double>(k));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        h[i][j] = mom[i + j + 2] - mom[i + 1] * mom[j + 1];
    // Solve H step = grad by elimination with partial pivoting.
    std::vector<std::vector<double>> m(k, std::vector<double>(k + 1));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) m[i][j] = h[i][j];
      m[i][k] = grad[i];
    }
    bool singular = false;
    for (int col = 0; col < k && !singular; ++col) {
      int piv = col;
      for (int r = col + 1; r < k; ++r)
        if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
      if (std::abs(m[piv][col]) < 1e-14) {
        singular = true;
        break;
      }
      std::swap(m[col], m[piv]);
      for (int r = 0; r < k; ++r) {
        if (r == col) continue;
        const double fac = m[r][col] / m[col][col];
        for (int c = col; c <= k; ++c) m[r][c] -= fac * m[col][c];
      }
    }
    if (singular) {
      model.degenerate = true;
      break;
    }
    std::vector<double> step(k);
    for (int i = 0; i < k; ++i) step[i] = m[i][k] / m[i][i];

    // Damped update: halve until the objective decreases.
    double scale = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half, scale *= 0.5) {
      std::vector<double> cand = model.beta;
      for (int j = 0; j < k; ++j) cand[j] -= scale * step[j];
      double cand_log_xi = 0.0;
      const double cand_f = objective(cand, cand_log_xi);
      if (cand_f < f) {
        model.beta = std::move(cand);
        f = cand_f;
        log_xi = cand_log_xi;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no descent direction left at this precision
    double mag = 0.0;
    for (double v : model.beta) mag = std::max(mag, std::abs(v));
    if (mag > 1e6) {
      model.degenerate = true;
      break;
    }
  }
  model.iterations = it;
  model.log_partition = log_xi;
  return model;
}

}  // namespace forest_spectra
