// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Every tolerance is pinned here; seeds are frozen so runs are reproducible.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "forest_spectra/alias.hpp"
#include "forest_spectra/dense_oracle.hpp"
#include "forest_spectra/maxent.hpp"
#include "forest_spectra/moment_problem.hpp"
#include "forest_spectra/pipeline.hpp"
#include "forest_spectra/replicas.hpp"
#include "forest_spectra/sampler.hpp"
#include "oracle_util.hpp"

using namespace forest_spectra;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

void report(int criterion, bool pass, const std::string& name,
            const std::string& detail) {
  std::printf("criterion %d: %s - %s (%s)\n", criterion,
              pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

WeightedGraph random_weighted_graph(int n, double mean_degree,
                                    std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform() < mean_degree / (n - 1))
        e.push_back({u, v, 0.5 + rng.uniform()});
  return WeightedGraph::from_edges(n, e);
}

// ---- criterion 1: forest-law exactness ----
void criterion_1() {
  Timer timer;
  bool pass = true;
  double worst_p = 1.0;
  const std::vector<std::pair<std::string, WeightedGraph>> graphs = {
      {"K2", oracle::k2()}, {"triangle", oracle::triangle()}};
  for (const auto& [name, g] : graphs) {
    NeighborSampler ns(g);
    for (double q : {0.5, 1.0, 3.0}) {
      oracle::ForestLaw law = oracle::enumerate_forest_law(g, q);
      std::map<std::vector<std::int32_t>, std::int64_t> counts;
      const int trials = 100000;
      for (int t = 0; t < trials; ++t) {
        Rng rng = Rng::stream(1001 + static_cast<int>(10 * q), t, 0);
        ++counts[wilson_sample(g, ns, q, rng).forest.next];
      }
      std::vector<std::int64_t> observed;
      std::vector<double> expected;
      for (const auto& [key, p] : law.prob) {
        expected.push_back(p);
        auto it = counts.find(key);
        observed.push_back(it == counts.end() ? 0 : it->second);
        if (it != counts.end()) counts.erase(it);
      }
      pass = pass && counts.empty();
      const double p = oracle::chi_square_pvalue(observed, expected);
      worst_p = std::min(worst_p, p);
      pass = pass && p > 0.001;
    }
  }
  const double secs = timer.seconds();
  pass = pass && secs < 10.0;
  report(1, pass, "forest-law exactness (Kirchhoff weights, chi-square)",
         fmt("worst p=%.4f over K2/triangle x q in {0.5,1,3}, 1e5 samples, "
             "%.1fs",
             worst_p, secs));
}

// ---- criterion 2: trace identities ----
void criterion_2() {
  Timer timer;
  bool pass = true;
  double worst_sigma = 0.0;
  int checks = 0;
  for (int gi = 0; gi < 20; ++gi) {
    const int n = 20 + static_cast<int>(9 * gi);  // 20..191
    WeightedGraph g = random_weighted_graph(n, 5.0, 2000 + gi);
    GraphScalars sc = g.scalars();
    QGrid grid = QGrid::make(sc.lambda_bar / 2.0, sc.alpha, 0.25);
    MomentEstimates est = estimate_moments(g, grid, 4, 10000, 3000 + gi);
    for (std::size_t qi = 0; qi < grid.values.size(); ++qi)
      for (int k = 1; k <= 4; ++k) {
        const double truth =
            oracle::trace_kq_power(g, grid.values[qi], k) / n;
        const double se = std::max(est.stderr_[k - 1][qi], 1e-15);
        const double sigmas = std::abs(est.mean[k - 1][qi] - truth) / se;
        worst_sigma = std::max(worst_sigma, sigmas);
        pass = pass && sigmas <= 4.0;
        ++checks;
      }
  }
  const double secs = timer.seconds();
  pass = pass && secs < 300.0;
  report(2, pass, "trace identities E|xi_q^k| = Tr(K_q^k)",
         fmt("%d checks on 20 graphs (n<=200, 1e4 groups, k<=4, 5 grid q), "
             "worst %.2f sigma, %.0fs",
             checks, worst_sigma, secs));
}

// ---- criterion 3: coupling marginals ----
void criterion_3() {
  bool pass = true;
  double worst_p = 1.0;
  const std::vector<std::pair<std::string, WeightedGraph>> graphs = {
      {"K2", oracle::k2()},
      {"P3", oracle::path3()},
      {"triangle", oracle::triangle()}};
  for (const auto& [name, g] : graphs) {
    NeighborSampler ns(g);
    const double top = g.scalars().spectral_upper;
    const double q = 0.45 * top;  // interior grid value
    oracle::ForestLaw law = oracle::enumerate_forest_law(g, q);
    const std::vector<double> grid{q};
    TrajectoryOptions opt;
    opt.keep_grid_forests = true;  // compare full successor maps, not just
                                   // root maps
    std::map<std::vector<std::int32_t>, std::int64_t> counts;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
      Rng rng = Rng::stream(41234, t, 0);
      Trajectory tr =
          coupled_trajectory(g, ns, 0.05 * top, top, grid, rng, opt);
      ++counts[tr.grid_forests[0].next];
    }
    std::vector<std::int64_t> observed;
    std::vector<double> expected;
    for (const auto& [key, p] : law.prob) {
      expected.push_back(p);
      auto it = counts.find(key);
      observed.push_back(it == counts.end() ? 0 : it->second);
      if (it != counts.end()) counts.erase(it);
    }
    pass = pass && counts.empty();
    const double p = oracle::chi_square_pvalue(observed, expected);
    worst_p = std::min(worst_p, p);
    pass = pass && p > 0.001;
  }
  report(3, pass, "coupling marginals match direct Wilson samples",
         fmt("worst p=%.4f on K2/P3/triangle full forests at interior q, "
             "1e5 trajectories",
             worst_p));
}

// ---- criterion 4: sampling-cost identities ----
void criterion_4() {
  Timer timer;
  bool pass = true;
  double worst_sigma = 0.0;
  bool r_ok = true;
  // part a: trace formula and reread bound on n <= 500
  for (int gi = 0; gi < 3; ++gi) {
    const int n = 100 + 200 * gi;
    WeightedGraph g = random_weighted_graph(n, 6.0, 4000 + gi);
    GraphScalars sc = g.scalars();
    const double q0 = sc.lambda_bar / 100.0;
    const double expect = oracle::trace_cost(g, q0);
    NeighborSampler ns(g);
    const int trials = 2000;
    double sum = 0.0, sumsq = 0.0, sum_r = 0.0;
    for (int t = 0; t < trials; ++t) {
      Rng rng = Rng::stream(5000 + gi, t, 0);
      Trajectory tr =
          coupled_trajectory(g, ns, q0, sc.spectral_upper, {}, rng);
      sum += static_cast<double>(tr.cost.sampled);
      sumsq += static_cast<double>(tr.cost.sampled) * tr.cost.sampled;
      sum_r += static_cast<double>(tr.cost.rereads);
    }
    const double mean = sum / trials;
    const double se =
        std::sqrt((sumsq / trials - mean * mean) / (trials - 1.0));
    const double sigmas = std::abs(mean - expect) / se;
    worst_sigma = std::max(worst_sigma, sigmas);
    pass = pass && sigmas <= 4.0;
    r_ok = r_ok && sum_r / trials <= n * std::log1p(sc.alpha / q0);
  }
  pass = pass && r_ok;
  // part b: linear scaling on ER graphs
  std::vector<double> lns, lncost;
  for (int n : {500, 1000, 2000, 4000}) {
    WeightedGraph g = gen_er_mean_degree(n, 20.0, 4100 + n);
    GraphScalars sc = g.scalars();
    const double q0 = 0.01 * sc.lambda_bar;
    NeighborSampler ns(g);
    const int trials = 30;
    double total = 0.0;
    for (int t = 0; t < trials; ++t) {
      Rng rng = Rng::stream(6000 + n, t, 0);
      Trajectory tr =
          coupled_trajectory(g, ns, q0, sc.spectral_upper, {}, rng);
      total += static_cast<double>(tr.cost.sampled + tr.cost.rereads);
    }
    lns.push_back(std::log(n));
    lncost.push_back(std::log(total / trials));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lns.size(); ++i) {
    mx += lns[i];
    my += lncost[i];
  }
  mx /= lns.size();
  my /= lns.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lns.size(); ++i) {
    sxx += (lns[i] - mx) * (lns[i] - mx);
    sxy += (lns[i] - mx) * (lncost[i] - my);
  }
  const double slope = sxy / sxx;
  pass = pass && std::abs(slope - 1.0) <= 0.2;
  report(4, pass, "sampling cost: E[S] trace identity, R bound, linear scaling",
         fmt("worst %.2f sigma, R bound %s, log-log slope %.3f, %.0fs",
             worst_sigma, r_ok ? "held in all runs" : "VIOLATED", slope,
             timer.seconds()));
}

// ---- criterion 5: moment-problem oracle equivalence ----
void criterion_5() {
  Timer timer;
  Rng rng(77001);
  int bracket_violations = 0, interval_violations = 0, reproduce_failures = 0;
  int measures = 0, bounds_checked = 0;
  while (measures < 10000) {
    oracle::AtomicTestMeasure m = oracle::random_atomic_measure(rng);
    const int l = 1 + static_cast<int>(rng.below(4));
    if (static_cast<int>(m.atoms.size()) * 2 <= l + 1) continue;
    ++measures;
    MomentSequence ms{0.0, 1.0, {}};
    for (int k = 0; k <= l; ++k) ms.moments.push_back(m.moment(k));
    auto [lo, hi] = admissible_interval(ms);
    const double next = m.moment(l + 1);
    if (next < lo - 1e-9 || next > hi + 1e-9) ++interval_violations;
    PrincipalPair pr = principal_representations(ms);
    for (int k = 0; k <= l; ++k) {
      if (std::abs(pr.lower.moment(k) - ms.moments[k]) > 1e-9)
        ++reproduce_failures;
      if (std::abs(pr.upper.moment(k) - ms.moments[k]) > 1e-9)
        ++reproduce_failures;
    }
    for (int j = 0; j < 20; ++j) {
      const double xi = 0.02 + 0.96 * rng.uniform();
      MarkovBounds b = markov_bounds(ms, xi);
      ++bounds_checked;
      if (m.tail_open(xi) < b.lower - 1e-9) ++bracket_violations;
      if (m.tail_closed(xi) > b.upper + 1e-9) ++bracket_violations;
      if (xi > 0.03 && xi < 0.97) {
        bool has_clear = true;
        for (double x : m.atoms) has_clear = has_clear && std::abs(x - xi) > 1e-6;
        if (has_clear) {
          CanonicalRep c = canonical_representation(ms, xi);
          for (int k = 0; k <= l; ++k)
            if (std::abs(c.measure.moment(k) - ms.moments[k]) > 1e-9)
              ++reproduce_failures;
        }
      }
    }
  }
  const bool pass = bracket_violations == 0 && interval_violations == 0 &&
                    reproduce_failures == 0;
  report(5, pass, "moment-problem oracle equivalence",
         fmt("1e4 measures, %d bound checks: %d bracket / %d interval / %d "
             "reproduction failures, %.0fs",
             bounds_checked, bracket_violations, interval_violations,
             reproduce_failures, timer.seconds()));
}

// ---- criterion 6: maxent correctness ----
void criterion_6() {
  bool pass = true;
  std::string fail_note = "all subchecks held";
  // gradient vs central differences at 100 random points
  Rng rng(88001);
  double worst_grad = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(4));
    std::vector<double> beta(k), target(k);
    for (double& b : beta) b = 6.0 * (rng.uniform() - 0.5);
    for (int j = 0; j < k; ++j) target[j] = rng.uniform();
    auto objective = [&](const std::vector<double>& b) {
      double part = 0.0;
      moment_integrals(b, 0.0, 1.0, 0, &part);
      double f = std::log(part);
      for (int j = 0; j < k; ++j) f += b[j] * target[j];
      return f;
    };
    auto mom = moment_integrals(beta, 0.0, 1.0, k);
    for (int j = 0; j < k; ++j) {
      std::vector<double> up = beta, dn = beta;
      up[j] += 1e-6;
      dn[j] -= 1e-6;
      const double fd = (objective(up) - objective(dn)) / 2e-6;
      const double an = target[j] - mom[j + 1];
      const double rel = std::abs(fd - an) /
                         std::max({std::abs(fd), std::abs(an), 1e-3});
      worst_grad = std::max(worst_grad, rel);
    }
  }
  if (worst_grad > 1e-5) {
    pass = false;
    fail_note = "gradient check failed";
  }
  // uniform fixtures return beta* = 0
  MaxentModel u1 = maxent_fit(std::vector<double>{0.5}, 0.0, 1.0);
  MaxentModel u2 = maxent_fit(std::vector<double>{0.5, 1.0 / 3.0}, 0.0, 1.0);
  if (!u1.converged || std::abs(u1.beta[0]) > 1e-8) pass = false;
  if (!u2.converged || std::abs(u2.beta[0]) > 1e-8 ||
      std::abs(u2.beta[1]) > 1e-8)
    pass = false;
  // truncated exponential recovered
  const double mean = (1.0 - 2.0 * std::exp(-1.0)) / (1.0 - std::exp(-1.0));
  MaxentModel ex = maxent_fit(std::vector<double>{mean}, 0.0, 1.0);
  if (!ex.converged || std::abs(ex.beta[0] - 1.0) > 1e-6) pass = false;
  // converged fits reproduce moments to 1e-7
  double worst_mom = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(3));
    std::vector<double> beta(k);
    for (double& b : beta) b = 4.0 * (rng.uniform() - 0.5);
    auto mom = moment_integrals(beta, 0.0, 1.0, k);
    std::vector<double> target(mom.begin() + 1, mom.end());
    MaxentModel fit = maxent_fit(target, 0.0, 1.0);
    if (!fit.converged) {
      pass = false;
      continue;
    }
    for (int j = 1; j <= k; ++j)
      worst_mom =
          std::max(worst_mom, std::abs(fit.moment(j) - target[j - 1]));
  }
  if (worst_mom > 1e-7) pass = false;
  report(6, pass, "maxent correctness",
         fmt("grad rel err %.2e (<=1e-5), uniform beta=0 to 1e-8, "
             "trunc-exp beta to 1e-6, moment recovery %.2e (<=1e-7)",
             worst_grad, worst_mom));
}

// ---- criterion 7: end-to-end accuracy on ER n=2000 ----
void criterion_7() {
  Timer timer;
  WeightedGraph g = gen_er(2000, 3.0 * std::log(2000.0) / 2000.0, 424242);
  RunConfig cfg;
  cfg.base_seed = 20260810;
  cfg.exact_oracle = true;
  SpectralReport rep = estimate_cdf_graph(g, cfg);
  double err = 0.0;
  int n_pred = 0, inside = 0;
  for (const auto& row : rep.rows) {
    const double sig_lo =
        std::max(0.0, (row.markov_lower - row.env_lower) / 1.96);
    const double sig_hi =
        std::max(0.0, (row.env_upper - row.markov_upper) / 1.96);
    if (row.exact_f >= row.markov_lower - 3.0 * sig_lo - 1e-9 &&
        row.exact_f <= row.markov_upper + 3.0 * sig_hi + 1e-9)
      ++inside;
    if (row.k_valid >= 2 && !std::isnan(row.prediction)) {
      err += std::abs(row.prediction - row.exact_f);
      ++n_pred;
    }
  }
  const double mae = n_pred > 0 ? err / n_pred : 1.0;
  const double frac_inside =
      static_cast<double>(inside) / static_cast<double>(rep.rows.size());
  const double secs = timer.seconds();
  const bool pass = mae <= 0.05 && frac_inside >= 0.95 && secs < 300.0;
  report(7, pass, "end-to-end accuracy, ER n=2000 with defaults",
         fmt("mean |prediction - exact| = %.4f over %d points with "
             "k_valid>=2 (<=0.05), envelope coverage %.1f%% (>=95%%), %.0fs",
             mae, n_pred, 100.0 * frac_inside, secs));
}

// ---- criterion 8: double cover ----
void criterion_8() {
  Timer timer;
  bool pass = true;
  // 50 random symmetric matrices: multiset identity to 1e-9
  Rng rng(99001);
  double worst_gap = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(31));
    SymmetricMatrix m;
    m.n = n;
    for (int i = 0; i < n; ++i) {
      m.entries.push_back({i, i, 4.0 * (rng.uniform() - 0.5)});
      for (int j = i + 1; j < n; ++j)
        if (rng.uniform() < 0.4)
          m.entries.push_back({i, j, 2.0 * (rng.uniform() - 0.5)});
    }
    ShiftedMatrix s = shift_to_dominant(m);
    CoverPair cover = double_cover(s.matrix, s.shift);
    auto ev1 = oracle::eigenvalues(cover.l1);
    auto ev2 = oracle::eigenvalues(cover.l2);
    auto dm = s.matrix.dense_row_major();
    for (double& v : dm) v = -v;
    ExactSpectrum sm = exact_spectrum_dense(dm, n);
    std::vector<double> merged = ev1;
    merged.insert(merged.end(), sm.eigenvalues.begin(), sm.eigenvalues.end());
    std::sort(merged.begin(), merged.end());
    for (std::size_t i = 0; i < merged.size(); ++i)
      worst_gap = std::max(worst_gap, std::abs(merged[i] - ev2[i]));
  }
  pass = pass && worst_gap <= 1e-9;

  // end-to-end symmetric pipeline on a 64-node diagonally dominant matrix:
  // a signed graph (random +/-1 edges) with a little diagonal slack, so the
  // cover pair genuinely mixes the two sheets
  Rng rng2(99002);
  SymmetricMatrix m;
  m.n = 64;
  std::vector<double> offsum(64, 0.0);
  for (int i = 0; i < 64; ++i)
    for (int j = i + 1; j < 64; ++j)
      if (rng2.uniform() < 0.15) {
        const double v = rng2.uniform() < 0.5 ? 1.0 : -1.0;
        m.entries.push_back({i, j, v});
        offsum[i] += 1.0;
        offsum[j] += 1.0;
      }
  for (int i = 0; i < 64; ++i)
    m.entries.push_back({i, i, -offsum[i] - 0.5 * rng2.uniform()});
  RunConfig cfg;
  cfg.base_seed = 4242;
  cfg.exact_oracle = true;
  SpectralReport rep = estimate_cdf_symmetric(m, cfg);
  double err = 0.0;
  int n_pred = 0, inside = 0;
  for (const auto& row : rep.rows) {
    const double sig_lo =
        std::max(0.0, (row.markov_lower - row.env_lower) / 1.96);
    const double sig_hi =
        std::max(0.0, (row.env_upper - row.markov_upper) / 1.96);
    if (row.exact_f >= row.markov_lower - 3.0 * sig_lo - 1e-9 &&
        row.exact_f <= row.markov_upper + 3.0 * sig_hi + 1e-9)
      ++inside;
    if (row.k_valid >= 2 && !std::isnan(row.prediction)) {
      err += std::abs(row.prediction - row.exact_f);
      ++n_pred;
    }
  }
  const double mae = n_pred > 0 ? err / n_pred : 1.0;
  const double frac_inside =
      static_cast<double>(inside) / static_cast<double>(rep.rows.size());
  pass = pass && mae <= 0.1 && frac_inside >= 0.95;
  report(8, pass, "double cover: spectra identity and symmetric pipeline",
         fmt("multiset gap %.2e (<=1e-9); 64-node run: mae %.4f (<=0.1), "
             "coverage %.1f%% (>=95%%), %.0fs",
             worst_gap, mae, 100.0 * frac_inside, timer.seconds()));
}

// ---- criterion 9: star-graph pathology surfaces honestly ----
void criterion_9() {
  Timer timer;
  const int n = 5000;
  WeightedGraph g = gen_star(n);
  RunConfig cfg;
  cfg.base_seed = 31337;
  cfg.samples = 100;  // the failure mode is parameter-independent
  SpectralReport rep = estimate_cdf_graph(g, cfg);
  // star spectrum in closed form: {0, 1 x (n-2), n}
  auto exact_f = [&](double q) {
    double c = 1.0;
    if (q >= 1.0 - 1e-12) c += n - 2;
    if (q >= n - 1e-9) c += 1;
    return c / n;
  };
  int low_valid = 0, trivial_rows = 0, bad_trivial = 0, bracket_ok = 0;
  for (const auto& row : rep.rows) {
    if (row.k_valid <= 1) ++low_valid;
    if (row.k_valid == 0) {
      ++trivial_rows;
      const bool honest = row.method == "trivial" &&
                          std::isnan(row.prediction) &&
                          row.markov_lower == 0.0 && row.markov_upper == 1.0;
      if (!honest) ++bad_trivial;
    }
    // no confident wrong claim: the (envelope-widened) window must keep
    // holding the true CDF even though the point prediction is unreliable
    const double sig_lo =
        std::max(0.0, (row.markov_lower - row.env_lower) / 1.96);
    const double sig_hi =
        std::max(0.0, (row.env_upper - row.markov_upper) / 1.96);
    const double truth = exact_f(row.q);
    if (truth >= row.markov_lower - 3.0 * sig_lo - 1e-9 &&
        truth <= row.markov_upper + 3.0 * sig_hi + 1e-9)
      ++bracket_ok;
  }
  const double frac_low =
      static_cast<double>(low_valid) / static_cast<double>(rep.rows.size());
  const double frac_bracket =
      static_cast<double>(bracket_ok) / static_cast<double>(rep.rows.size());
  const bool pass = frac_low >= 0.8 && bad_trivial == 0 &&
                    frac_bracket >= 0.95;
  report(9, pass, "star graph K(1,4999) pathology reported, not hidden",
         fmt("k_valid<=1 on %.1f%% of grid (>=80%%), %d trivial rows, "
             "window holds truth on %.1f%% (>=95%%), %.0fs",
             100.0 * frac_low, trivial_rows, 100.0 * frac_bracket,
             timer.seconds()));
}

}  // namespace

int main() {
  Timer total;
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("%d/9 criteria passed in %.0fs\n", 9 - g_failures,
              total.seconds());
  return g_failures == 0 ? 0 : 1;
}
