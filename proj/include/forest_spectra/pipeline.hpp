#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "forest_spectra/embed.hpp"
#include "forest_spectra/generators.hpp"
#include "forest_spectra/graph.hpp"
#include "forest_spectra/replicas.hpp"

namespace forest_spectra {

enum class RunMode { kAuto, kLaplacian, kSubLaplacian, kSymmetric };

struct RunConfig {
  // Input: a file, or a generator spec (tests may instead pass a graph to
  // estimate_cdf_graph directly).
  std::string input_path;
  GraphFormat format = GraphFormat::kEdgeList;
  std::optional<GeneratorSpec> generator;
  RunMode mode = RunMode::kAuto;

  double eps0 = 0.01;
  std::int32_t replicas = 4;  // l
  std::int32_t samples = 400;  // s
  std::uint64_t base_seed = 0;
  bool exact_oracle = false;
  std::int32_t exact_cap = 4000;
  bool isotonic = false;
  std::int32_t threads = 1;
  double extra_shift = 0.0;  // symmetric mode: spectral margin on top of c
};

struct ReportRow {
  double q = 0.0;          // rate on the (sub-)Laplacian axis
  double q_shifted = 0.0;  // q - c; differs from q only in symmetric mode
  std::vector<double> moments;  // m_hat_1..m_hat_l
  std::vector<double> stderrs;
  int k_valid = 0;
  double markov_lower = 0.0;
  double markov_upper = 1.0;
  double env_lower = 0.0;  // bounds envelope over moment-confidence corners
  double env_upper = 1.0;
  double prediction = 0.0;  // NaN when no prediction is available
  // Symmetric mode only: un-clamped 2*F2 - F1 before the [0,1] projection.
  double prediction_raw = std::numeric_limits<double>::quiet_NaN();
  int maxent_order = 0;  // k actually used by the fit; 0 when none
  std::string method;    // maxent | markov-exact | trivial
  double exact_f = 0.0;  // NaN unless the oracle ran
};

struct SpectralReport {
  std::string mode;
  std::int32_t n = 0;
  std::int64_t m = 0;
  GraphScalars scalars;
  double q0 = 0.0;
  double eps0 = 0.0;
  std::int32_t replicas = 0, samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t graph_hash = 0;
  double shift = 0.0;  // diagonal shift c (symmetric mode)
  std::vector<ReportRow> rows;
  // Monotone repair of the prediction column (only when requested).
  std::vector<double> isotonic_prediction;
  // Raw moment table (empty in symmetric mode; see sub-reports).
  std::optional<MomentEstimates> moment_table;
  // Symmetric mode keeps the two sub-Laplacian reports.
  std::vector<SpectralReport> sub_reports;
};

// Full pipeline per the run configuration.
SpectralReport estimate_cdf(const RunConfig& cfg);

// Same pipeline with the graph already in hand (laplacian/sub-laplacian).
SpectralReport estimate_cdf_graph(const WeightedGraph& g,
                                  const RunConfig& cfg);

// Symmetric-matrix entry point.
SpectralReport estimate_cdf_symmetric(const SymmetricMatrix& m,
                                      const RunConfig& cfg);

struct BenchResult {
  std::int32_t trajectories = 0;
  double mean_sampled = 0.0;
  double stderr_sampled = 0.0;
  double mean_rereads = 0.0;
  double bound_sampled = 0.0;  // n (1 + lambda_bar/q0)
  double bound_rereads = 0.0;  // n ln(1 + alpha/q0)
  double exact_sampled = 0.0;  // trace formula (n-gated)
  bool exact_available = false;
  double seconds_per_trajectory = 0.0;
};

BenchResult bench_costs(const WeightedGraph& g, double q0,
                        std::int32_t trajectories, std::uint64_t seed);

void write_report_csv(const SpectralReport& rep, std::ostream& out);
void write_report_json(const SpectralReport& rep, std::ostream& out);
void write_moments_csv(const MomentEstimates& est, std::ostream& out);

}  // namespace forest_spectra
