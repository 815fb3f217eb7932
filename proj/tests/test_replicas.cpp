#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "forest_spectra/alias.hpp"
#include "forest_spectra/replicas.hpp"
#include "forest_spectra/sampler.hpp"
#include "oracle_util.hpp"

using namespace forest_spectra;

namespace {

QGrid manual_grid(std::vector<double> values) {
  QGrid g;
  g.q0 = values.front();
  g.eps0 = 1.0;
  g.ratio = 0.0;
  g.values = std::move(values);
  return g;
}

}  // namespace

TEST_CASE("make_grid: endpoints forced by the formula") {
  QGrid g = QGrid::make(1.0, 50.0, 0.5);
  REQUIRE(g.values.size() == 3);
  CHECK(g.values[0] == doctest::Approx(1.0));
  CHECK(g.values[1] == doctest::Approx(10.0));
  CHECK(g.values[2] == doctest::Approx(100.0));
  CHECK(g.ratio == doctest::Approx(10.0));
}

TEST_CASE("make_grid: eps0=0.01 gives 101 points ending at 2 alpha") {
  QGrid g = QGrid::make(0.02, 3.0, 0.01);
  CHECK(g.values.size() == 101);
  CHECK(g.values.back() == doctest::Approx(6.0).epsilon(1e-9));
  for (std::size_t i = 1; i < g.values.size(); ++i)
    CHECK(g.values[i] > g.values[i - 1]);
}

TEST_CASE("make_grid: single step") {
  QGrid g = QGrid::make(0.5, 1.0, 1.0);  // q0 = 2a/4
  REQUIRE(g.values.size() == 2);
  CHECK(g.values[0] == doctest::Approx(0.5));
  CHECK(g.values[1] == doctest::Approx(2.0));
}

TEST_CASE("make_grid: domain errors") {
  CHECK_THROWS_AS(QGrid::make(10.0, 5.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(QGrid::make(0.0, 5.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(QGrid::make(1.0, 5.0, 0.0), std::invalid_argument);
}

TEST_CASE("xi_sizes: edgeless graph counts every node at every depth") {
  Forest f;
  f.next.assign(6, Forest::kNoSuccessor);
  f.kind.assign(6, RootKind::kMark);
  RootMap rm = compute_root_map(f);
  std::vector<const RootMap*> maps{&rm, &rm, &rm};
  auto xs = xi_sizes(maps, false);
  CHECK(xs == std::vector<std::int32_t>{6, 6, 6});
}

TEST_CASE("xi_sizes: l=1 is the root count") {
  WeightedGraph g = oracle::triangle();
  NeighborSampler ns(g);
  for (int t = 0; t < 100; ++t) {
    Rng rng = Rng::stream(101, t, 0);
    WilsonResult w = wilson_sample(g, ns, 1.0, rng);
    RootMap rm = compute_root_map(w.forest);
    std::vector<const RootMap*> maps{&rm};
    int roots = 0;
    for (int x = 0; x < 3; ++x) roots += w.forest.is_root(x);
    CHECK(xi_sizes(maps, false)[0] == roots);
  }
}

TEST_CASE("xi_sizes: triangle q=3, two replicas, E = Tr(K_q^2) = 1.5") {
  WeightedGraph g = oracle::triangle();
  NeighborSampler ns(g);
  const double expect = oracle::trace_kq_power(g, 3.0, 2);
  CHECK(expect == doctest::Approx(1.5));
  const int trials = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng r0 = Rng::stream(103, t, 0);
    Rng r1 = Rng::stream(103, t, 1);
    RootMap a = compute_root_map(wilson_sample(g, ns, 3.0, r0).forest);
    RootMap b = compute_root_map(wilson_sample(g, ns, 3.0, r1).forest);
    std::vector<const RootMap*> maps{&a, &b};
    const double v = xi_sizes(maps, false)[1];
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / trials;
  const double sd = std::sqrt((sumsq / trials - mean * mean) / trials);
  CHECK(std::abs(mean - expect) < 4.0 * sd);
}

TEST_CASE("xi_sizes: node count mismatch rejected") {
  Forest f1, f2;
  f1.next.assign(3, Forest::kNoSuccessor);
  f1.kind.assign(3, RootKind::kMark);
  f2.next.assign(4, Forest::kNoSuccessor);
  f2.kind.assign(4, RootKind::kMark);
  RootMap a = compute_root_map(f1), b = compute_root_map(f2);
  std::vector<const RootMap*> maps{&a, &b};
  CHECK_THROWS_AS(xi_sizes(maps, false), std::invalid_argument);
}

TEST_CASE("estimate_moments: edgeless graph is exact with zero stderr") {
  WeightedGraph g = WeightedGraph::from_edges(5, {});
  // grid values are arbitrary (no events ever fire)
  MomentEstimates est =
      estimate_moments(g, manual_grid({0.5, 1.0}), 3, 10, 7);
  for (int k = 0; k < 3; ++k)
    for (int qi = 0; qi < 2; ++qi) {
      CHECK(est.mean[k][qi] == doctest::Approx(1.0));
      CHECK(est.stderr_[k][qi] == doctest::Approx(0.0));
    }
}

TEST_CASE("estimate_moments: K2 at q=2 targets m1 = 0.75") {
  WeightedGraph g = oracle::k2();
  MomentEstimates est = estimate_moments(g, manual_grid({2.0}), 1, 4000, 11);
  CHECK(std::abs(est.mean[0][0] - 0.75) < 4.0 * est.stderr_[0][0]);
}

TEST_CASE("estimate_moments: unbiased against dense Tr(K_q^k)/n") {
  Rng seed_rng(301);
  for (int trial = 0; trial < 2; ++trial) {
    const int n = 20 + static_cast<int>(seed_rng.below(30));
    std::vector<Edge> e;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (seed_rng.uniform() < 4.0 / n)
          e.push_back({u, v, 0.5 + seed_rng.uniform()});
    WeightedGraph g = WeightedGraph::from_edges(n, e);
    GraphScalars sc = g.scalars();
    QGrid grid = QGrid::make(sc.lambda_bar / 10.0, sc.alpha, 0.5);
    const int l = 4, s = 4000;
    MomentEstimates est = estimate_moments(g, grid, l, s, 500 + trial);
    for (std::size_t qi = 0; qi < grid.values.size(); ++qi) {
      for (int k = 1; k <= l; ++k) {
        const double truth =
            oracle::trace_kq_power(g, grid.values[qi], k) / n;
        const double err = std::abs(est.mean[k - 1][qi] - truth);
        CHECK(err < 4.0 * std::max(est.stderr_[k - 1][qi], 1e-12));
      }
    }
  }
}

TEST_CASE("estimate_moments: killed graph targets the sub-Laplacian spectrum") {
  // K2 with unit edge and delta = (1,1): -M' has spectrum {1, 3}.
  std::vector<Edge> e{{0, 1, 1.0}};
  WeightedGraph g = WeightedGraph::from_edges(2, e, {1.0, 1.0});
  auto ev = oracle::eigenvalues(g);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0] == doctest::Approx(1.0));
  CHECK(ev[1] == doctest::Approx(3.0));
  MomentEstimates est =
      estimate_moments(g, manual_grid({0.8, 2.0}), 3, 6000, 13);
  for (std::size_t qi = 0; qi < 2; ++qi) {
    const double q = est.grid.values[qi];
    for (int k = 1; k <= 3; ++k) {
      double truth = 0.0;
      for (double lam : ev) truth += std::pow(q / (q + lam), k);
      truth /= 2.0;
      CHECK(std::abs(est.mean[k - 1][qi] - truth) <
            4.0 * std::max(est.stderr_[k - 1][qi], 1e-12));
    }
  }
}

TEST_CASE("moment monotonicity: decreasing in k, increasing in q") {
  WeightedGraph g = oracle::triangle();
  GraphScalars sc = g.scalars();
  QGrid grid = QGrid::make(sc.lambda_bar / 20.0, sc.alpha, 0.25);
  MomentEstimates est = estimate_moments(g, grid, 4, 2000, 17);
  for (std::size_t qi = 0; qi < grid.values.size(); ++qi)
    for (int k = 1; k < 4; ++k) {
      const double slack =
          4.0 * (est.stderr_[k - 1][qi] + est.stderr_[k][qi]);
      CHECK(est.mean[k][qi] <= est.mean[k - 1][qi] + slack);
    }
  for (int k = 0; k < 4; ++k)
    for (std::size_t qi = 1; qi < grid.values.size(); ++qi) {
      const double slack =
          4.0 * (est.stderr_[k][qi - 1] + est.stderr_[k][qi]);
      CHECK(est.mean[k][qi] + slack >= est.mean[k][qi - 1]);
    }
}

TEST_CASE("relative error scaling: stderr <= 3 sqrt(m/(s n))") {
  WeightedGraph g = oracle::triangle();
  GraphScalars sc = g.scalars();
  QGrid grid = QGrid::make(sc.lambda_bar / 100.0, sc.alpha, 0.2);
  const int s = 2000;
  MomentEstimates est = estimate_moments(g, grid, 4, s, 19);
  for (std::size_t qi = 0; qi < grid.values.size(); ++qi)
    for (int k = 0; k < 4; ++k) {
      const double m = est.mean[k][qi];
      if (m <= 0.0) continue;
      CHECK(est.stderr_[k][qi] <= 3.0 * std::sqrt(m / (s * 3.0)));
    }
}

TEST_CASE("group_variance_check: clean run passes, injected fixture flagged") {
  WeightedGraph g = oracle::triangle();
  MomentEstimates est = estimate_moments(g, manual_grid({3.0}), 1, 10000, 23);
  CHECK(group_variance_check(est).ok());

  // adversarial fixture: variance forced above 1.2x mean
  MomentEstimates bad = est;
  bad.count_mean[0][0] = 1.0;
  bad.count_var[0][0] = 2.0;
  VarianceReport rep = group_variance_check(bad);
  REQUIRE(!rep.ok());
  CHECK(rep.violations[0].k == 1);
}

TEST_CASE("determinism: identical results for 1 and 4 worker threads") {
  WeightedGraph g = oracle::triangle();
  GraphScalars sc = g.scalars();
  QGrid grid = QGrid::make(sc.lambda_bar / 10.0, sc.alpha, 0.5);
  MomentEstimates a = estimate_moments(g, grid, 2, 200, 29, /*threads=*/1);
  MomentEstimates b = estimate_moments(g, grid, 2, 200, 29, /*threads=*/4);
  for (int k = 0; k < 2; ++k) {
    CHECK(a.mean[k] == b.mean[k]);
    CHECK(a.stderr_[k] == b.stderr_[k]);
  }
}
