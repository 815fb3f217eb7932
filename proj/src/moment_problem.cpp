#include "forest_spectra/moment_problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace forest_spectra {

namespace {

constexpr double kSingularTol = 1e-12;
constexpr double kMomentTol = 1e-9;
constexpr double kWeightClampTol = 1e-12;
constexpr double kRootTol = 1e-13;

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// ---- rescaled core: all arithmetic on [0,1] ------------------------------

struct Scaled {
  double a, width;            // original interval [a, a+width]
  std::vector<double> mu;     // rescaled moments mu_0..mu_l

  int order() const { return static_cast<int>(mu.size()) - 1; }
};

Scaled rescale(const MomentSequence& ms) {
  if (!(ms.b > ms.a))
    throw std::invalid_argument("moment sequence needs a < b");
  if (ms.moments.empty())
    throw std::invalid_argument("moment sequence needs m_0");
  Scaled s;
  s.a = ms.a;
  s.width = ms.b - ms.a;
  const int l = ms.order();
  s.mu.resize(l + 1);
  for (int k = 0; k <= l; ++k) {
    double acc = 0.0;
    for (int j = 0; j <= k; ++j)
      acc += binom(k, j) * std::pow(-ms.a, k - j) * ms.moments[j];
    s.mu[k] = acc / std::pow(s.width, k);
  }
  return s;
}

double poly_eval_scaled(const Poly& p, double x) {
  double r = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

Poly poly_shift_up(const Poly& p) {  // X * p
  Poly r(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) r[i + 1] = p[i];
  return r;
}

Poly poly_deriv(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly r(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) r[i - 1] = p[i] * i;
  return r;
}

int effective_degree(const Poly& p, double rel_tol = 1e-11) {
  double scale = 0.0;
  for (double c : p) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return -1;
  for (std::size_t i = p.size(); i-- > 0;)
    if (std::abs(p[i]) > rel_tol * scale) return static_cast<int>(i);
  return -1;
}

// Moment functional <P, Q> = L_mu(P*Q); deg P + deg Q must not exceed the
// number of known moments.
double inner(const std::vector<double>& mu, const Poly& p, const Poly& q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    for (std::size_t j = 0; j < q.size(); ++j)
      acc += p[i] * q[j] * mu[i + j];
  }
  return acc;
}

struct Recursion {
  std::vector<Poly> unitary;
  std::vector<Poly> normalized;
  std::vector<double> norms;  // <U_k, U_k>
  int singular_at = -1;
};

// Three-term recurrence for the monic orthogonal polynomials of mu.
Recursion ortho_recursion(const std::vector<double>& mu) {
  const int l = static_cast<int>(mu.size()) - 1;
  Recursion rec;
  const double tol = kSingularTol * std::max(std::abs(mu[0]), 1e-300);
  rec.unitary.push_back({1.0});
  double d0 = mu[0];
  if (d0 <= tol) {
    rec.singular_at = 0;
    return rec;
  }
  rec.norms.push_back(d0);
  rec.normalized.push_back({1.0 / std::sqrt(d0)});

  const int max_u = (l + 1) / 2;  // highest computable unitary degree
  for (int k = 0; static_cast<int>(rec.unitary.size()) <= max_u; ++k) {
    const Poly& uk = rec.unitary[k];
    // beta_k needs moments to 2k+1.
    if (2 * k + 1 > l) break;
    const double dk = rec.norms[k];
    const double beta = inner(mu, poly_shift_up(uk), uk) / dk;
    Poly next = poly_shift_up(uk);
    for (std::size_t i = 0; i < uk.size(); ++i) next[i] -= beta * uk[i];
    if (k >= 1) {
      const double gamma = dk / rec.norms[k - 1];
      const Poly& prev = rec.unitary[k - 1];
      for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= gamma * prev[i];
    }
    rec.unitary.push_back(next);
    const int kk = k + 1;
    if (2 * kk <= l) {
      double d = inner(mu, next, next);
      if (d <= tol) {
        rec.singular_at = kk;
        break;
      }
      rec.norms.push_back(d);
      Poly v = next;
      const double inv = 1.0 / std::sqrt(d);
      for (double& c : v) c *= inv;
      rec.normalized.push_back(v);
    }
  }
  return rec;
}

// Roots of p restricted to [lo, hi]; closed form through degree 2,
// bisection on sign changes above that.
std::vector<double> poly_roots(const Poly& p_in, double lo, double hi) {
  int d = effective_degree(p_in);
  if (d <= 0) return {};
  Poly p(p_in.begin(), p_in.begin() + d + 1);
  std::vector<double> roots;
  if (d == 1) {
    roots.push_back(-p[0] / p[1]);
  } else if (d == 2) {
    const double c2 = p[2], c1 = p[1], c0 = p[0];
    double disc = c1 * c1 - 4.0 * c2 * c0;
    const double scale = c1 * c1 + std::abs(4.0 * c2 * c0);
    if (disc < 0.0) {
      if (-disc > 1e-11 * std::max(scale, 1e-300))
        throw NumericalDegeneracy("complex roots in degree-2 factor");
      disc = 0.0;
    }
    const double s = std::sqrt(disc);
    const double q = -0.5 * (c1 + (c1 >= 0.0 ? s : -s));
    if (q != 0.0) {
      roots.push_back(q / c2);
      roots.push_back(c0 / q);
    } else {
      roots.push_back(std::sqrt(std::abs(c0 / c2)));
      roots.push_back(-roots.back());
    }
  } else {
    const int kScan = 4096;
    const double pad = 1e-9 * (hi - lo);
    const double left = lo - pad, right = hi + pad;
    double xp = left, fp = poly_eval_scaled(p, left);
    Poly dp = poly_deriv(p);
    for (int i = 1; i <= kScan; ++i) {
      const double x = left + (right - left) * i / kScan;
      const double f = poly_eval_scaled(p, x);
      if (fp == 0.0) roots.push_back(xp);
      if ((fp < 0.0 && f > 0.0) || (fp > 0.0 && f < 0.0)) {
        double bl = xp, bh = x, fl = fp;
        for (int it = 0; it < 200 && bh - bl > kRootTol; ++it) {
          const double mid = 0.5 * (bl + bh);
          const double fm = poly_eval_scaled(p, mid);
          if ((fl < 0.0) == (fm < 0.0)) {
            bl = mid;
            fl = fm;
          } else {
            bh = mid;
          }
        }
        double r = 0.5 * (bl + bh);
        for (int it = 0; it < 3; ++it) {
          const double der = poly_eval_scaled(dp, r);
          if (der == 0.0) break;
          const double step = poly_eval_scaled(p, r) / der;
          const double r2 = r - step;
          if (r2 < bl - kRootTol || r2 > bh + kRootTol) break;
          r = r2;
        }
        roots.push_back(r);
      }
      xp = x;
      fp = f;
    }
    if (static_cast<int>(roots.size()) != d)
      throw NumericalDegeneracy("bisection found " +
                                std::to_string(roots.size()) + " of " +
                                std::to_string(d) + " expected roots");
  }
  std::sort(roots.begin(), roots.end());
  for (double& r : roots) r = std::clamp(r, lo, hi);
  return roots;
}

// Solves sum_i w_i x_i^k = rhs_k, k < atoms.size(), by elimination with
// partial pivoting (systems here have at most ~6 unknowns).
std::vector<double> vandermonde_solve(const std::vector<double>& atoms,
                                      const std::vector<double>& rhs) {
  const int n = static_cast<int>(atoms.size());
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m[i][j] = std::pow(atoms[j], i);
    m[i][n] = rhs[i];
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-300)
      throw NumericalDegeneracy("vandermonde system singular");
    std::swap(m[col], m[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      if (f == 0.0) continue;
      for (int c = col; c <= n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = m[i][n] / m[i][i];
  return w;
}

struct ScaledMeasure {
  std::vector<double> atoms;    // in [0,1], ascending
  std::vector<double> weights;  // >= 0

  double moment(int k) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      acc += weights[i] * std::pow(atoms[i], k);
    return acc;
  }
  double mass_above(double z, bool include) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (atoms[i] > z || (include && atoms[i] == z)) acc += weights[i];
    return acc;
  }
};

// Merges near-coincident atoms, solves for weights, clamps roundoff
// negatives, and verifies every known moment. Returns nullopt if the
// candidate atom set cannot reproduce the moments (wrong branch or
// breakdown); throws only for weights negative beyond tolerance handled by
// callers.
std::optional<ScaledMeasure> assemble_measure(std::vector<double> atoms,
                                              const std::vector<double>& mu,
                                              bool allow_negative_reject) {
  std::sort(atoms.begin(), atoms.end());
  std::vector<double> merged;
  for (double x : atoms) {
    if (!merged.empty() && x - merged.back() < 1e-11)
      continue;
    merged.push_back(std::clamp(x, 0.0, 1.0));
  }
  if (merged.empty()) {
    bool all_zero = true;
    for (double m : mu) all_zero = all_zero && std::abs(m) <= kMomentTol;
    if (!all_zero) return std::nullopt;
    return ScaledMeasure{};
  }
  if (merged.size() > mu.size()) merged.resize(mu.size());
  std::vector<double> rhs(mu.begin(), mu.begin() + merged.size());
  std::vector<double> w;
  try {
    w = vandermonde_solve(merged, rhs);
  } catch (const NumericalDegeneracy&) {
    return std::nullopt;
  }
  const double m0 = std::max(std::abs(mu[0]), 1e-300);
  for (double& wi : w) {
    if (wi < 0.0) {
      if (allow_negative_reject && wi < -kWeightClampTol * m0)
        return std::nullopt;
      if (wi < -kWeightClampTol * m0)
        throw NumericalDegeneracy("representation weight negative: " +
                                  std::to_string(wi));
      wi = 0.0;
    }
  }
  ScaledMeasure sm{std::move(merged), std::move(w)};
  for (std::size_t k = 0; k < mu.size(); ++k)
    if (std::abs(sm.moment(static_cast<int>(k)) - mu[k]) > kMomentTol * m0)
      return std::nullopt;
  return sm;
}

std::vector<double> modified_a(const std::vector<double>& mu) {
  // moments of x mu(dx) on [0,1]
  return {mu.begin() + 1, mu.end()};
}
std::vector<double> modified_b(const std::vector<double>& mu) {
  // moments of (1-x) mu(dx)
  std::vector<double> r(mu.size() - 1);
  for (std::size_t k = 0; k + 1 < mu.size(); ++k) r[k] = mu[k] - mu[k + 1];
  return r;
}
std::vector<double> modified_ab(const std::vector<double>& mu) {
  // moments of (1-x) x mu(dx)
  std::vector<double> r(mu.size() - 2);
  for (std::size_t k = 0; k + 2 < mu.size(); ++k)
    r[k] = mu[k + 1] - mu[k + 2];
  return r;
}

struct ScaledPrincipal {
  ScaledMeasure lower, upper;
};

ScaledPrincipal principal_scaled(const Scaled& s) {
  const int l = s.order();
  const auto& mu = s.mu;
  ScaledPrincipal out;
  auto must = [&](std::optional<ScaledMeasure> m,
                  const char* which) -> ScaledMeasure {
    if (!m)
      throw NumericalDegeneracy(std::string("principal representation (") +
                                which + ") failed verification");
    return *m;
  };
  if (l % 2 == 1) {
    const int r = (l - 1) / 2;
    Recursion rec = ortho_recursion(mu);
    if (static_cast<int>(rec.unitary.size()) <= r + 1)
      throw NumericalDegeneracy("singular sequence: no principal representations");
    out.lower = must(
        assemble_measure(poly_roots(rec.unitary[r + 1], 0.0, 1.0), mu, false),
        "gauss");
    std::vector<double> atoms = {0.0, 1.0};
    if (r >= 1) {
      Recursion rab = ortho_recursion(modified_ab(mu));
      if (static_cast<int>(rab.unitary.size()) <= r)
        throw NumericalDegeneracy("singular (b-x)(x-a) sequence");
      for (double x : poly_roots(rab.unitary[r], 0.0, 1.0))
        atoms.push_back(x);
    }
    out.upper = must(assemble_measure(std::move(atoms), mu, false), "lobatto");
  } else {
    const int r = l / 2;
    std::vector<double> atoms_lo = {0.0}, atoms_hi = {1.0};
    if (r >= 1) {
      Recursion ra = ortho_recursion(modified_a(mu));
      Recursion rb = ortho_recursion(modified_b(mu));
      if (static_cast<int>(ra.unitary.size()) <= r ||
          static_cast<int>(rb.unitary.size()) <= r)
        throw NumericalDegeneracy("singular endpoint-modified sequence");
      for (double x : poly_roots(ra.unitary[r], 0.0, 1.0))
        atoms_lo.push_back(x);
      for (double x : poly_roots(rb.unitary[r], 0.0, 1.0))
        atoms_hi.push_back(x);
    }
    out.lower = must(assemble_measure(std::move(atoms_lo), mu, false), "radau-a");
    out.upper = must(assemble_measure(std::move(atoms_hi), mu, false), "radau-b");
  }
  return out;
}

AtomicMeasure unscale_measure(const ScaledMeasure& sm, const Scaled& s) {
  AtomicMeasure m;
  m.atoms.reserve(sm.atoms.size());
  for (double z : sm.atoms) m.atoms.push_back(s.a + s.width * z);
  m.weights = sm.weights;
  return m;
}

// Detects singular sequences (unique representation); returns that
// representation when found. Two detectors: a vanishing denominator in the
// base recursion, and a next moment pinched against a prefix's admissible
// interval (which the base recursion cannot see when the pinch involves
// endpoint mass and the moments run out).
std::optional<ScaledMeasure> singular_scaled(const Scaled& s) {
  const auto& mu = s.mu;
  const int l = s.order();
  const double m0 = std::abs(mu[0]);
  const double tol = kSingularTol * std::max(m0, 1e-300);
  if (m0 <= tol) {
    // zero measure
    auto zero = assemble_measure({}, mu, true);
    if (!zero) throw NumericalDegeneracy("m_0 ~ 0 but higher moments are not");
    return zero;
  }
  auto verified = [&](const ScaledMeasure& cand) {
    for (int k = 0; k <= l; ++k)
      if (std::abs(cand.moment(k) - mu[k]) > 10 * kMomentTol * m0)
        return false;
    return true;
  };
  Recursion rec = ortho_recursion(mu);
  if (rec.singular_at >= 0) {
    // Support is exactly the roots of the first degenerate U_k.
    auto cand = assemble_measure(
        poly_roots(rec.unitary[rec.singular_at], 0.0, 1.0), mu, false);
    if (!cand || !verified(*cand))
      throw NumericalDegeneracy(
          "singular sequence has no consistent representation");
    return cand;
  }
  for (int j = 0; j < l; ++j) {
    Scaled prefix{0.0, 1.0, {mu.begin(), mu.begin() + j + 1}};
    ScaledPrincipal pr = principal_scaled(prefix);
    const double lo = pr.lower.moment(j + 1);
    const double hi = pr.upper.moment(j + 1);
    const double btol = std::max(1e-11 * m0, 1e-13 * (hi - lo));
    if (mu[j + 1] <= lo + btol || mu[j + 1] >= hi - btol) {
      const ScaledMeasure& cand =
          mu[j + 1] <= lo + btol ? pr.lower : pr.upper;
      if (!verified(cand))
        throw NumericalDegeneracy(
            "singular sequence is not admissible (pinched moment "
            "contradicts later moments)");
      return cand;
    }
  }
  return std::nullopt;
}

// Builds Q(x) = sum_k V_k(z) V_k(x) from a recursion, up to degree cap.
Poly kernel_poly(const Recursion& rec, double z, int degree_cap) {
  Poly q{0.0};
  for (int k = 0;
       k < static_cast<int>(rec.normalized.size()) && k <= degree_cap; ++k) {
    const Poly& v = rec.normalized[k];
    const double vz = poly_eval_scaled(v, z);
    if (q.size() < v.size()) q.resize(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) q[i] += vz * v[i];
  }
  return q;
}

struct ScaledCanonical {
  ScaledMeasure measure;
  double xi_weight = 0.0;
};

struct BranchAttempt {
  std::optional<ScaledMeasure> first, second;
  double denom_first = 0.0, denom_second = 0.0;
};

BranchAttempt canonical_attempts(const Scaled& s, double z) {
  const auto& mu = s.mu;
  const int l = s.order();
  BranchAttempt at;
  if (l % 2 == 1) {
    const int r = (l - 1) / 2;
    Recursion ra = ortho_recursion(modified_a(mu));
    Recursion rb = ortho_recursion(modified_b(mu));
    if (static_cast<int>(ra.normalized.size()) >= r + 1) {
      Poly qa = kernel_poly(ra, z, r);
      at.denom_first = z * poly_eval_scaled(qa, z);
      std::vector<double> atoms = poly_roots(qa, 0.0, 1.0);
      atoms.push_back(z);
      atoms.push_back(0.0);
      at.first = assemble_measure(std::move(atoms), mu, true);
    }
    if (static_cast<int>(rb.normalized.size()) >= r + 1) {
      Poly qb = kernel_poly(rb, z, r);
      at.denom_second = (1.0 - z) * poly_eval_scaled(qb, z);
      std::vector<double> atoms = poly_roots(qb, 0.0, 1.0);
      atoms.push_back(z);
      atoms.push_back(1.0);
      at.second = assemble_measure(std::move(atoms), mu, true);
    }
  } else {
    const int r = l / 2;
    Recursion rec = ortho_recursion(mu);
    if (static_cast<int>(rec.normalized.size()) >= r + 1) {
      Poly q = kernel_poly(rec, z, r);
      at.denom_first = poly_eval_scaled(q, z);
      std::vector<double> atoms = poly_roots(q, 0.0, 1.0);
      atoms.push_back(z);
      at.first = assemble_measure(std::move(atoms), mu, true);
    }
    if (r >= 1) {
      Recursion rab = ortho_recursion(modified_ab(mu));
      if (static_cast<int>(rab.normalized.size()) >= r) {
        Poly qab = kernel_poly(rab, z, r - 1);
        at.denom_second = (1.0 - z) * z * poly_eval_scaled(qab, z);
        std::vector<double> atoms = poly_roots(qab, 0.0, 1.0);
        atoms.push_back(z);
        atoms.push_back(0.0);
        atoms.push_back(1.0);
        at.second = assemble_measure(std::move(atoms), mu, true);
      }
    }
  }
  return at;
}

ScaledCanonical canonical_scaled(const Scaled& s, double z) {
  if (!(z > 0.0 && z < 1.0))
    throw std::invalid_argument("canonical representation needs xi in (a,b)");
  BranchAttempt at = canonical_attempts(s, z);
  // The valid branch is the one with the larger kernel denominator
  // (smaller atom weight); fall back to whichever verified.
  const ScaledMeasure* pick = nullptr;
  if (at.first && at.second)
    pick = at.denom_first >= at.denom_second ? &*at.first : &*at.second;
  else if (at.first)
    pick = &*at.first;
  else if (at.second)
    pick = &*at.second;
  if (!pick)
    throw NumericalDegeneracy("both canonical branches failed");
  ScaledCanonical out;
  out.measure = *pick;
  double t = 0.0;
  bool found = false;
  for (std::size_t i = 0; i < out.measure.atoms.size(); ++i) {
    if (std::abs(out.measure.atoms[i] - z) < 1e-11) {
      t = out.measure.weights[i];
      // store xi exactly so tail evaluations can exclude it
      out.measure.atoms[i] = z;
      found = true;
      break;
    }
  }
  if (!found)
    throw NumericalDegeneracy("canonical atom at xi collapsed into another");
  out.xi_weight = t;
  return out;
}

}  // namespace

// ---- public surface -------------------------------------------------------

double poly_eval(const Poly& p, double x) { return poly_eval_scaled(p, x); }

double AtomicMeasure::moment(int k) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    acc += weights[i] * std::pow(atoms[i], k);
  return acc;
}

double AtomicMeasure::mass_above(double xi, bool include_xi) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i] > xi || (include_xi && atoms[i] == xi)) acc += weights[i];
  }
  return acc;
}

int AtomicMeasure::index_in(double a, double b) const {
  int idx = 0;
  for (double x : atoms) idx += (x == a || x == b) ? 1 : 2;
  return idx;
}

OrthoPolys orthogonal_polynomials(const MomentSequence& ms) {
  Scaled s = rescale(ms);
  Recursion rec = ortho_recursion(s.mu);
  OrthoPolys out;
  out.singular_at = rec.singular_at;
  // Map back to the original variable: U_k(x) = w^k * u_k((x-a)/w) stays
  // monic; V_k(x) = v_k((x-a)/w) keeps unit norm.
  auto substitute = [&](const Poly& p, bool monic_scale) {
    Poly r(p.size(), 0.0);
    const int d = static_cast<int>(p.size()) - 1;
    for (int i = 0; i <= d; ++i) {
      if (p[i] == 0.0) continue;
      const double scale =
          p[i] * (monic_scale ? std::pow(s.width, d - i) : std::pow(s.width, -i));
      // (x - a)^i expansion
      for (int j = 0; j <= i; ++j)
        r[j] += scale * binom(i, j) * std::pow(-s.a, i - j);
    }
    return r;
  };
  for (const Poly& u : rec.unitary) out.unitary.push_back(substitute(u, true));
  for (const Poly& v : rec.normalized)
    out.normalized.push_back(substitute(v, false));
  return out;
}

PrincipalPair principal_representations(const MomentSequence& ms) {
  Scaled s = rescale(ms);
  if (auto sing = singular_scaled(s))
    throw NumericalDegeneracy(
        "principal representations require a regular sequence");
  ScaledPrincipal sp = principal_scaled(s);
  return {unscale_measure(sp.lower, s), unscale_measure(sp.upper, s)};
}

std::pair<double, double> admissible_interval(const MomentSequence& ms) {
  PrincipalPair pr = principal_representations(ms);
  const int next = ms.order() + 1;
  return {pr.lower.moment(next), pr.upper.moment(next)};
}

int validate_sequence(double a, double b, std::span<const double> m_hat,
                      std::span<const double> radii) {
  if (m_hat.size() != radii.size())
    throw std::invalid_argument("validate_sequence: radii size mismatch");
  for (double r : radii)
    if (!(r >= 0.0))
      throw std::invalid_argument("validate_sequence: negative radius");
  MomentSequence prefix{a, b, {1.0}};
  int k_valid = 0;
  for (std::size_t k = 0; k < m_hat.size(); ++k) {
    std::pair<double, double> window;
    try {
      window = admissible_interval(prefix);
    } catch (const NumericalDegeneracy&) {
      break;  // singular prefix: next moment pinned, no room for a radius
    }
    const double slack = 1e-12 * std::max(1.0, std::abs(window.second));
    if (m_hat[k] - radii[k] < window.first - slack ||
        m_hat[k] + radii[k] > window.second + slack)
      break;
    k_valid = static_cast<int>(k) + 1;
    prefix.moments.push_back(m_hat[k]);
  }
  return k_valid;
}

CanonicalRep canonical_representation(const MomentSequence& ms, double xi) {
  Scaled s = rescale(ms);
  if (auto sing = singular_scaled(s))
    throw std::invalid_argument(
        "canonical representation requires a regular sequence");
  const double z = (xi - ms.a) / s.width;
  ScaledCanonical sc = canonical_scaled(s, z);
  CanonicalRep out;
  out.measure = unscale_measure(sc.measure, s);
  out.xi_weight = sc.xi_weight;
  // Pin the xi atom to the exact input value for tail evaluations.
  for (std::size_t i = 0; i < sc.measure.atoms.size(); ++i)
    if (sc.measure.atoms[i] == z) out.measure.atoms[i] = xi;
  return out;
}

CanonicalBranches canonical_branches(const MomentSequence& ms, double xi) {
  Scaled s = rescale(ms);
  const double z = (xi - ms.a) / s.width;
  BranchAttempt at = canonical_attempts(s, z);
  CanonicalBranches out;
  out.denom_first = at.denom_first;
  out.denom_second = at.denom_second;
  if (at.first) out.interiorish = unscale_measure(*at.first, s);
  if (at.second) out.endpointish = unscale_measure(*at.second, s);
  return out;
}

MarkovBounds markov_bounds(const MomentSequence& ms, double xi) {
  const double m0 = ms.moments.at(0);
  if (xi <= ms.a) return {m0, m0, 0.0};
  if (xi >= ms.b) return {0.0, 0.0, 0.0};
  Scaled s = rescale(ms);
  const double z = (xi - ms.a) / s.width;
  // Atoms within atol of z count as mass at xi: this can only widen the
  // window, never invalidate it.
  const double atol = 1e-9;
  auto split = [&](const ScaledMeasure& m) {
    MarkovBounds b;
    for (std::size_t i = 0; i < m.atoms.size(); ++i) {
      if (m.atoms[i] > z + atol)
        b.lower += m.weights[i];
      else if (m.atoms[i] >= z - atol)
        b.atom_weight += m.weights[i];
    }
    b.upper = b.lower + b.atom_weight;
    return b;
  };
  if (auto sing = singular_scaled(s)) return split(*sing);
  return split(canonical_scaled(s, z).measure);
}

std::optional<AtomicMeasure> singular_representation(const MomentSequence& ms) {
  Scaled s = rescale(ms);
  auto sing = singular_scaled(s);
  if (!sing) return std::nullopt;
  return unscale_measure(*sing, s);
}

}  // namespace forest_spectra
