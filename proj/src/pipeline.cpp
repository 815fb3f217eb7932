#include "forest_spectra/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "forest_spectra/dense_oracle.hpp"
#include "forest_spectra/maxent.hpp"
#include "forest_spectra/moment_problem.hpp"
#include "forest_spectra/sampler.hpp"

namespace forest_spectra {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kXi = 0.5;  // F(q) = P(Y_q >= 1/2)

// Clamp corner moments into the admissible region (sequentially, with a
// hair of interior margin) and evaluate Markov bounds there.
std::optional<MarkovBounds> corner_bounds(double a, double b,
                                          std::span<const double> corner) {
  MomentSequence seq{a, b, {1.0}};
  for (double c : corner) {
    std::pair<double, double> win;
    try {
      win = admissible_interval(seq);
    } catch (const NumericalDegeneracy&) {
      break;  // singular prefix; evaluate what we have
    }
    if (!(win.second > win.first)) {
      seq.moments.push_back(0.5 * (win.first + win.second));
      continue;
    }
    const double margin = 1e-9 * (win.second - win.first);
    seq.moments.push_back(
        std::clamp(c, win.first + margin, win.second - margin));
  }
  if (seq.moments.size() < 2) return std::nullopt;
  try {
    return markov_bounds(seq, kXi);
  } catch (const NumericalDegeneracy&) {
    return std::nullopt;
  }
}

struct RowWork {
  double a = 0.0;
  std::vector<double> m_hat, radii;
  int k_valid = 0;
};

// Per-graph forest pipeline: moments along the coupled trajectories, then
// per-q moment-problem bounds and maxent predictions (descending q for the
// warm-start chain).
SpectralReport run_forest_pipeline(const WeightedGraph& g,
                                   const RunConfig& cfg,
                                   const std::string& mode_tag) {
  SpectralReport rep;
  rep.mode = mode_tag;
  rep.n = g.node_count();
  rep.m = g.edge_count();
  rep.scalars = g.scalars();
  rep.eps0 = cfg.eps0;
  rep.replicas = cfg.replicas;
  rep.samples = cfg.samples;
  rep.seed = cfg.base_seed;
  rep.graph_hash = g.structure_hash();

  if (rep.scalars.spectral_upper <= 0.0) {
    // No edges, no killing: the spectrum is {0,...,0} and F == 1
    // everywhere. Nothing to sample; emit a fixed two-point report.
    for (double q : {1.0, 2.0}) {
      ReportRow row;
      row.q = row.q_shifted = q;
      row.moments.assign(cfg.replicas, 1.0);
      row.stderrs.assign(cfg.replicas, 0.0);
      row.k_valid = cfg.replicas;
      row.markov_lower = row.markov_upper = 1.0;
      row.env_lower = row.env_upper = 1.0;
      row.prediction = 1.0;
      row.method = "markov-exact";
      row.exact_f = cfg.exact_oracle ? 1.0 : kNan;
      rep.rows.push_back(std::move(row));
    }
    rep.q0 = 0.0;
    return rep;
  }

  const double alpha_eff = rep.scalars.spectral_upper / 2.0;
  const double q0 = cfg.eps0 * rep.scalars.lambda_bar;
  rep.q0 = q0;
  QGrid grid = QGrid::make(q0, alpha_eff, cfg.eps0);
  MomentEstimates est = estimate_moments(g, grid, cfg.replicas, cfg.samples,
                                         cfg.base_seed, cfg.threads);

  std::optional<ExactSpectrum> oracle;
  if (cfg.exact_oracle) oracle = exact_spectrum(g, cfg.exact_cap);

  const auto nq = static_cast<std::int32_t>(grid.values.size());
  rep.rows.resize(nq);
  // warm[k-1]: multipliers of the last converged order-k fit (larger q).
  std::vector<std::vector<double>> warm(cfg.replicas);

  for (std::int32_t i = nq - 1; i >= 0; --i) {
    const double q = grid.values[i];
    ReportRow& row = rep.rows[i];
    row.q = row.q_shifted = q;
    const double a = q / (q + 2.0 * alpha_eff);
    row.moments.resize(cfg.replicas);
    row.stderrs.resize(cfg.replicas);
    std::vector<double> radii(cfg.replicas);
    for (std::int32_t k = 0; k < cfg.replicas; ++k) {
      row.moments[k] = est.mean[k][i];
      row.stderrs[k] = est.stderr_[k][i];
      radii[k] = 1.96 * est.stderr_[k][i];
    }
    row.k_valid = validate_sequence(a, 1.0, row.moments, radii);
    row.exact_f = oracle ? oracle->cdf(q) : kNan;

    if (row.k_valid == 0) {
      row.markov_lower = 0.0;
      row.markov_upper = 1.0;
      row.env_lower = 0.0;
      row.env_upper = 1.0;
      row.prediction = kNan;
      row.method = "trivial";
      continue;
    }

    MomentSequence ms{a, 1.0, {1.0}};
    for (int k = 0; k < row.k_valid; ++k)
      ms.moments.push_back(row.moments[k]);

    MarkovBounds mb;
    bool bounds_ok = true;
    try {
      mb = markov_bounds(ms, kXi);
    } catch (const NumericalDegeneracy&) {
      bounds_ok = false;
    }
    if (!bounds_ok) {
      row.markov_lower = 0.0;
      row.markov_upper = 1.0;
      row.env_lower = 0.0;
      row.env_upper = 1.0;
      row.prediction = kNan;
      row.method = "trivial";
      continue;
    }
    row.markov_lower = std::clamp(mb.lower, 0.0, 1.0);
    row.markov_upper = std::clamp(mb.upper, 0.0, 1.0);

    // Envelope over the 2^k corners of (m_hat_k +/- 1.96 stderr_k).
    row.env_lower = row.markov_lower;
    row.env_upper = row.markov_upper;
    const int corners = 1 << row.k_valid;
    std::vector<double> corner(row.k_valid);
    for (int mask = 0; mask < corners; ++mask) {
      for (int k = 0; k < row.k_valid; ++k)
        corner[k] =
            row.moments[k] + ((mask >> k) & 1 ? radii[k] : -radii[k]);
      if (auto cb = corner_bounds(a, 1.0, corner)) {
        row.env_lower = std::min(row.env_lower, cb->lower);
        row.env_upper = std::max(row.env_upper, cb->upper);
      }
    }
    row.env_lower = std::clamp(row.env_lower, 0.0, 1.0);
    row.env_upper = std::clamp(row.env_upper, 0.0, 1.0);

    const bool singular = singular_representation(ms).has_value();
    const double mid = 0.5 * (row.markov_lower + row.markov_upper);
    const double rel_width = (row.markov_upper - row.markov_lower) /
                             std::max(mid, 1e-12);
    if (singular || rel_width <= 0.01) {
      row.method = "markov-exact";
      row.prediction = mid;
      continue;
    }

    // Maxent with warm starts, falling back one order at a time when
    // Newton fails to converge within the iteration cap.
    row.method = "markov-exact";
    row.prediction = mid;
    for (int k = row.k_valid; k >= 1; --k) {
      std::vector<double> init;
      if (!warm[k - 1].empty()) {
        init = warm[k - 1];
      } else if (k >= 2 && !warm[k - 2].empty()) {
        init = warm[k - 2];
        init.push_back(0.0);
      }
      MaxentModel fit = maxent_fit(
          std::span<const double>(row.moments.data(), k), a, 1.0, init);
      if (fit.converged && !fit.degenerate) {
        warm[k - 1] = fit.beta;
        // The window is a hard constraint on F; a lower-order fallback fit
        // (or quadrature roundoff) may land a hair outside it.
        row.prediction = std::clamp(fit.tail(kXi), row.markov_lower,
                                    row.markov_upper);
        row.maxent_order = k;
        row.method = "maxent";
        break;
      }
    }
  }

  rep.moment_table = std::move(est);
  return rep;
}

void apply_isotonic(SpectralReport& rep) {
  std::vector<double> preds;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (!std::isnan(rep.rows[i].prediction)) {
      preds.push_back(rep.rows[i].prediction);
      where.push_back(i);
    }
  }
  std::vector<double> mono = isotonic_non_decreasing(preds);
  rep.isotonic_prediction.assign(rep.rows.size(), kNan);
  for (std::size_t j = 0; j < where.size(); ++j)
    rep.isotonic_prediction[where[j]] = mono[j];
}

}  // namespace

SpectralReport estimate_cdf_graph(const WeightedGraph& g,
                                  const RunConfig& cfg) {
  if (cfg.mode == RunMode::kLaplacian && g.has_killing())
    throw InputError(
        "mode=laplacian but the graph carries killing weights; use "
        "mode=sub-laplacian");
  const std::string tag = g.has_killing() ? "sub-laplacian" : "laplacian";
  SpectralReport rep = run_forest_pipeline(g, cfg, tag);
  if (cfg.isotonic) apply_isotonic(rep);
  return rep;
}

SpectralReport estimate_cdf_symmetric(const SymmetricMatrix& m,
                                      const RunConfig& cfg) {
  ShiftedMatrix shifted = shift_to_dominant(m, cfg.extra_shift);
  CoverPair cover = double_cover(shifted.matrix, shifted.shift);

  RunConfig sub = cfg;
  sub.exact_oracle = false;  // the combined oracle comes from -M' directly
  std::uint64_t s = cfg.base_seed;
  sub.base_seed = splitmix64(s);
  SpectralReport r1 = run_forest_pipeline(cover.l1, sub, "sub-laplacian");
  sub.base_seed = splitmix64(s);
  SpectralReport r2 = run_forest_pipeline(cover.l2, sub, "sub-laplacian");
  if (r1.rows.size() != r2.rows.size())
    throw std::logic_error("cover pipelines disagree on the grid");

  SpectralReport rep;
  rep.mode = "symmetric";
  rep.n = m.n;
  rep.m = static_cast<std::int64_t>(m.entries.size());
  rep.scalars = r1.scalars;
  rep.q0 = r1.q0;
  rep.eps0 = cfg.eps0;
  rep.replicas = cfg.replicas;
  rep.samples = cfg.samples;
  rep.seed = cfg.base_seed;
  rep.graph_hash = cover.l2.structure_hash();
  rep.shift = shifted.shift;

  std::optional<ExactSpectrum> oracle;
  if (cfg.exact_oracle) {
    std::vector<double> dense = shifted.matrix.dense_row_major();
    for (double& v : dense) v = -v;
    oracle = exact_spectrum_dense(dense, m.n, cfg.exact_cap);
  }

  rep.rows.resize(r1.rows.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const ReportRow& a = r1.rows[i];
    const ReportRow& b = r2.rows[i];
    ReportRow& row = rep.rows[i];
    row.q = a.q;
    row.q_shifted = a.q - shifted.shift;
    row.moments.assign(cfg.replicas, kNan);
    row.stderrs.assign(cfg.replicas, kNan);
    row.k_valid = std::min(a.k_valid, b.k_valid);
    row.markov_lower = std::clamp(2.0 * b.markov_lower - a.markov_upper, 0.0, 1.0);
    row.markov_upper = std::clamp(2.0 * b.markov_upper - a.markov_lower, 0.0, 1.0);
    row.env_lower = std::clamp(2.0 * b.env_lower - a.env_upper, 0.0, 1.0);
    row.env_upper = std::clamp(2.0 * b.env_upper - a.env_lower, 0.0, 1.0);
    if (!std::isnan(a.prediction) && !std::isnan(b.prediction)) {
      row.prediction_raw = 2.0 * b.prediction - a.prediction;
      row.prediction = std::clamp(row.prediction_raw, 0.0, 1.0);
    } else {
      row.prediction_raw = kNan;
      row.prediction = kNan;
    }
    if (a.method == "trivial" || b.method == "trivial")
      row.method = "trivial";
    else if (a.method == "maxent" || b.method == "maxent")
      row.method = "maxent";
    else
      row.method = "markov-exact";
    row.maxent_order = std::min(a.maxent_order, b.maxent_order);
    row.exact_f = oracle ? oracle->cdf(row.q) : kNan;
  }
  r1.moment_table.reset();
  r2.moment_table.reset();
  rep.sub_reports.push_back(std::move(r1));
  rep.sub_reports.push_back(std::move(r2));
  if (cfg.isotonic) apply_isotonic(rep);
  return rep;
}

SpectralReport estimate_cdf(const RunConfig& cfg) {
  if (cfg.mode == RunMode::kSymmetric) {
    if (cfg.input_path.empty())
      throw InputError("symmetric mode needs a matrix-market input file");
    return estimate_cdf_symmetric(load_symmetric_matrix(cfg.input_path), cfg);
  }
  WeightedGraph g;
  if (cfg.generator) {
    g = generate_graph(*cfg.generator);
  } else if (!cfg.input_path.empty()) {
    g = load_graph(cfg.input_path, cfg.format).graph;
  } else {
    throw InputError("no input graph given");
  }
  return estimate_cdf_graph(g, cfg);
}

BenchResult bench_costs(const WeightedGraph& g, double q0,
                        std::int32_t trajectories, std::uint64_t seed) {
  if (trajectories < 1) throw InputError("bench: need trajectories >= 1");
  GraphScalars sc = g.scalars();
  if (sc.spectral_upper <= 0.0)
    throw InputError("bench: graph has an empty spectrum range");
  const double q_max = std::max(sc.spectral_upper, q0);
  NeighborSampler ns(g);
  BenchResult out;
  out.trajectories = trajectories;
  CostBounds cb = cost_bounds(g, q0);
  out.bound_sampled = cb.sampled_upper;
  out.bound_rereads = cb.rereads_upper;
  out.exact_sampled = cb.expected_sampled_exact;
  out.exact_available = cb.exact_available;

  double sum_s = 0.0, sum_s2 = 0.0, sum_r = 0.0;
  auto start = std::chrono::steady_clock::now();
  for (std::int32_t t = 0; t < trajectories; ++t) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(t), 0);
    Trajectory tr = coupled_trajectory(g, ns, q0, q_max, {}, rng);
    sum_s += static_cast<double>(tr.cost.sampled);
    sum_s2 += static_cast<double>(tr.cost.sampled) *
              static_cast<double>(tr.cost.sampled);
    sum_r += static_cast<double>(tr.cost.rereads);
  }
  auto stop = std::chrono::steady_clock::now();
  out.mean_sampled = sum_s / trajectories;
  out.mean_rereads = sum_r / trajectories;
  const double var =
      trajectories > 1
          ? (sum_s2 - sum_s * sum_s / trajectories) / (trajectories - 1)
          : 0.0;
  out.stderr_sampled = std::sqrt(std::max(var, 0.0) / trajectories);
  out.seconds_per_trajectory =
      std::chrono::duration<double>(stop - start).count() / trajectories;
  return out;
}

namespace {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_report_csv(const SpectralReport& rep, std::ostream& out) {
  char buf[256];
  out << "# forest-spectra report format=1\n";
  std::snprintf(buf, sizeof buf,
                "# mode=%s seed=%llu eps0=%.17g replicas=%d samples=%d "
                "graph_hash=%016llx\n",
                rep.mode.c_str(),
                static_cast<unsigned long long>(rep.seed), rep.eps0,
                rep.replicas, rep.samples,
                static_cast<unsigned long long>(rep.graph_hash));
  out << buf;
  std::snprintf(buf, sizeof buf,
                "# n=%d m=%lld alpha=%.17g lambda_bar=%.17g "
                "spectral_upper=%.17g q0=%.17g shift=%.17g\n",
                rep.n, static_cast<long long>(rep.m), rep.scalars.alpha,
                rep.scalars.lambda_bar, rep.scalars.spectral_upper, rep.q0,
                rep.shift);
  out << buf;
  out << "q,q_shifted";
  for (std::int32_t k = 1; k <= rep.replicas; ++k)
    out << ",m" << k << ",stderr" << k;
  out << ",k_valid,markov_lower,markov_upper,env_lower,env_upper,prediction,"
         "maxent_order,method,exact_f";
  const bool with_raw = rep.mode == "symmetric";
  if (with_raw) out << ",prediction_raw";
  if (!rep.isotonic_prediction.empty()) out << ",prediction_isotonic";
  out << "\n";
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const ReportRow& r = rep.rows[i];
    out << fmt_double(r.q) << ',' << fmt_double(r.q_shifted);
    for (std::int32_t k = 0; k < rep.replicas; ++k)
      out << ',' << fmt_double(r.moments[k]) << ','
          << fmt_double(r.stderrs[k]);
    out << ',' << r.k_valid << ',' << fmt_double(r.markov_lower) << ','
        << fmt_double(r.markov_upper) << ',' << fmt_double(r.env_lower) << ','
        << fmt_double(r.env_upper) << ',' << fmt_double(r.prediction) << ','
        << r.maxent_order << ',' << r.method << ',' << fmt_double(r.exact_f);
    if (with_raw) out << ',' << fmt_double(r.prediction_raw);
    if (!rep.isotonic_prediction.empty())
      out << ',' << fmt_double(rep.isotonic_prediction[i]);
    out << '\n';
  }
}

void write_report_json(const SpectralReport& rep, std::ostream& out) {
  nlohmann::ordered_json j;
  j["mode"] = rep.mode;
  j["n"] = rep.n;
  j["m"] = rep.m;
  j["alpha"] = rep.scalars.alpha;
  j["lambda_bar"] = rep.scalars.lambda_bar;
  j["spectral_upper"] = rep.scalars.spectral_upper;
  j["q0"] = rep.q0;
  j["eps0"] = rep.eps0;
  j["replicas"] = rep.replicas;
  j["samples"] = rep.samples;
  j["seed"] = rep.seed;
  j["graph_hash"] = rep.graph_hash;
  j["shift"] = rep.shift;
  auto num_or_null = [](double v) {
    return std::isnan(v) ? nlohmann::ordered_json(nullptr)
                         : nlohmann::ordered_json(v);
  };
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const ReportRow& r = rep.rows[i];
    nlohmann::ordered_json row;
    row["q"] = r.q;
    row["q_shifted"] = r.q_shifted;
    nlohmann::ordered_json ms = nlohmann::ordered_json::array();
    nlohmann::ordered_json ss = nlohmann::ordered_json::array();
    for (std::int32_t k = 0; k < rep.replicas; ++k) {
      ms.push_back(num_or_null(r.moments[k]));
      ss.push_back(num_or_null(r.stderrs[k]));
    }
    row["moments"] = ms;
    row["stderrs"] = ss;
    row["k_valid"] = r.k_valid;
    row["markov_lower"] = r.markov_lower;
    row["markov_upper"] = r.markov_upper;
    row["env_lower"] = r.env_lower;
    row["env_upper"] = r.env_upper;
    row["prediction"] = num_or_null(r.prediction);
    if (rep.mode == "symmetric")
      row["prediction_raw"] = num_or_null(r.prediction_raw);
    row["maxent_order"] = r.maxent_order;
    row["method"] = r.method;
    row["exact_f"] = num_or_null(r.exact_f);
    if (!rep.isotonic_prediction.empty())
      row["prediction_isotonic"] = num_or_null(rep.isotonic_prediction[i]);
    rows.push_back(row);
  }
  j["rows"] = rows;
  out << j.dump(2) << "\n";
}

void write_moments_csv(const MomentEstimates& est, std::ostream& out) {
  out << "q,k,mean,stderr,s,l\n";
  const auto nq = static_cast<std::int32_t>(est.grid.values.size());
  for (std::int32_t qi = 0; qi < nq; ++qi)
    for (std::int32_t k = 0; k < est.replicas; ++k)
      out << fmt_double(est.grid.values[qi]) << ',' << (k + 1) << ','
          << fmt_double(est.mean[k][qi]) << ','
          << fmt_double(est.stderr_[k][qi]) << ',' << est.samples << ','
          << est.replicas << '\n';
}

}  // namespace forest_spectra
