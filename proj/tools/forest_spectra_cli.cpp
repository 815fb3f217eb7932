// forest-spectra: spectral CDF estimation for graph Laplacians and
// symmetric matrices via coupled Kirchhoff forest sampling.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "forest_spectra/dense_oracle.hpp"
#include "forest_spectra/embed.hpp"
#include "forest_spectra/generators.hpp"
#include "forest_spectra/graph.hpp"
#include "forest_spectra/moment_problem.hpp"
#include "forest_spectra/pipeline.hpp"
#include "forest_spectra/sampler.hpp"

namespace fs = forest_spectra;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

fs::GraphFormat parse_format(const std::string& s) {
  if (s == "edgelist") return fs::GraphFormat::kEdgeList;
  if (s == "mtx") return fs::GraphFormat::kMatrixMarket;
  throw fs::InputError("unknown format '" + s + "' (edgelist|mtx)");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw fs::InputError("cannot open '" + path + "' for writing");
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int run(int argc, char** argv) {
  CLI::App app{"Kirchhoff-forest spectral CDF estimation"};
  app.require_subcommand(1);

  // ---- estimate ----
  auto* est = app.add_subcommand(
      "estimate", "Estimate the spectral CDF of a graph or matrix");
  std::string graph_path, matrix_path, format = "edgelist", mode = "auto";
  std::string out_path = "report.csv";
  std::string gen_spec;
  fs::RunConfig cfg;
  est->add_option("--graph", graph_path, "Graph input file");
  est->add_option("--matrix", matrix_path,
                  "Symmetric matrix (matrix-market), implies --mode symmetric");
  est->add_option("--format", format, "Graph format: edgelist|mtx");
  est->add_option("--mode", mode, "laplacian|sub-laplacian|symmetric|auto");
  est->add_option("--generate", gen_spec,
                  "Generator spec family:key=value,... (see 'generate')");
  est->add_option("--eps0", cfg.eps0, "Grid parameter (default 0.01)");
  est->add_option("--replicas", cfg.replicas, "Replica count l (default 4)");
  est->add_option("--samples", cfg.samples, "Group count s (default 400)");
  est->add_option("--seed", cfg.base_seed, "Base RNG seed");
  est->add_flag("--exact", cfg.exact_oracle,
                "Also compute the dense-oracle CDF (n-gated)");
  est->add_option("--exact-cap", cfg.exact_cap, "Dense oracle size cap");
  est->add_flag("--isotonic", cfg.isotonic,
                "Emit a monotone-repaired prediction column");
  est->add_option("--threads", cfg.threads, "Worker threads (default 1)");
  est->add_option("--extra-shift", cfg.extra_shift,
                  "Extra diagonal shift margin (symmetric mode)");
  est->add_option("-o,--output", out_path, "Output CSV (JSON mirror at .json)");

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "Write a benchmark graph");
  fs::GeneratorSpec gspec;
  std::string gen_out = "graph.edges";
  gen->add_option("family", gspec.family,
                  "er|er_mean_degree|ba|sbm|sensor|comet|torus|star|path|"
                  "complete")
      ->required();
  gen->add_option("-n,--nodes", gspec.n, "Node count");
  gen->add_option("--p", gspec.p, "Edge probability (er)");
  gen->add_option("--degree", gspec.degree, "Mean degree (er_mean_degree)");
  gen->add_option("-m,--attach", gspec.m, "Edges per new node (ba)");
  gen->add_option("--communities", gspec.communities, "Community count (sbm)");
  gen->add_option("--p-in", gspec.p_in, "Intra-community probability (sbm)");
  gen->add_option("--p-out", gspec.p_out, "Inter-community probability (sbm)");
  gen->add_option("--k", gspec.k_nearest, "Nearest neighbours (sensor)");
  gen->add_option("--branches", gspec.branches, "Unit branches (comet)");
  gen->add_option("--tail", gspec.tail, "Tail length (comet)");
  gen->add_option("--width", gspec.width, "Torus width");
  gen->add_option("--height", gspec.height, "Torus height");
  gen->add_option("--seed", gspec.seed, "Seed");
  gen->add_option("-o,--output", gen_out, "Output edge-list path");

  // ---- exact ----
  auto* exact = app.add_subcommand("exact", "Dense-oracle spectrum and CDF");
  std::string exact_graph, exact_format = "edgelist", exact_out;
  std::int32_t exact_cap = 4000;
  exact->add_option("--graph", exact_graph, "Graph input file")->required();
  exact->add_option("--format", exact_format, "edgelist|mtx");
  exact->add_option("--cap", exact_cap, "Size cap");
  exact->add_option("-o,--output", exact_out, "CSV output (default stdout)");

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "Trajectory cost measurement");
  std::string bench_graph, bench_format = "edgelist", bench_out;
  double bench_q0 = 0.0;
  std::int32_t bench_traj = 100;
  std::uint64_t bench_seed = 0;
  bench->add_option("--graph", bench_graph, "Graph input file")->required();
  bench->add_option("--format", bench_format, "edgelist|mtx");
  bench->add_option("--q0", bench_q0, "Smallest rate (default eps0*lambda_bar)");
  bench->add_option("--trajectories", bench_traj, "Trajectory count");
  bench->add_option("--seed", bench_seed, "Seed");
  bench->add_option("-o,--output", bench_out, "CSV output (default stdout)");

  // ---- embed ----
  auto* embed = app.add_subcommand(
      "embed", "Shift + double cover of a symmetric matrix");
  std::string embed_matrix, embed_prefix = "cover";
  double embed_extra = 0.0;
  embed->add_option("--matrix", embed_matrix, "Matrix-market input")
      ->required();
  embed->add_option("--extra-shift", embed_extra, "Extra shift margin");
  embed->add_option("-o,--output", embed_prefix, "Output path prefix");

  // ---- moments check ----
  auto* moments = app.add_subcommand("moments", "Moment-sequence utilities");
  auto* mcheck = moments->add_subcommand(
      "check", "Validate a moment sequence given as JSON");
  std::string mcheck_json;
  mcheck->add_option("--json", mcheck_json, "JSON input file")->required();

  // ---- sample ----
  auto* sample = app.add_subcommand(
      "sample", "Dump one coupled trajectory's root maps as JSON");
  std::string sample_graph, sample_format = "edgelist", sample_out;
  double sample_qmin = 0.0, sample_qmax = 0.0;
  std::string sample_grid;
  std::uint64_t sample_seed = 0;
  sample->add_option("--graph", sample_graph, "Graph input file")->required();
  sample->add_option("--format", sample_format, "edgelist|mtx");
  sample->add_option("--qmin", sample_qmin, "Smallest rate")->required();
  sample->add_option("--qmax", sample_qmax, "Largest rate")->required();
  sample->add_option("--grid", sample_grid,
                     "Comma-separated snapshot rates (default qmin,qmax)");
  sample->add_option("--seed", sample_seed, "Seed");
  sample->add_option("-o,--output", sample_out, "JSON output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message / help text
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (est->parsed()) {
    cfg.input_path = graph_path;
    cfg.format = parse_format(format);
    if (mode == "laplacian") cfg.mode = fs::RunMode::kLaplacian;
    else if (mode == "sub-laplacian") cfg.mode = fs::RunMode::kSubLaplacian;
    else if (mode == "symmetric") cfg.mode = fs::RunMode::kSymmetric;
    else if (mode == "auto") cfg.mode = fs::RunMode::kAuto;
    else throw fs::InputError("unknown mode '" + mode + "'");
    if (!matrix_path.empty()) {
      cfg.mode = fs::RunMode::kSymmetric;
      cfg.input_path = matrix_path;
    }
    if (!gen_spec.empty()) {
      // family:key=value,... e.g. er:n=2000,p=0.0114,seed=1
      fs::GeneratorSpec gs;
      auto colon = gen_spec.find(':');
      gs.family = gen_spec.substr(0, colon);
      if (colon != std::string::npos) {
        std::stringstream ss(gen_spec.substr(colon + 1));
        std::string kv;
        while (std::getline(ss, kv, ',')) {
          auto eq = kv.find('=');
          if (eq == std::string::npos)
            throw fs::InputError("bad generator spec token '" + kv + "'");
          const std::string key = kv.substr(0, eq);
          const std::string val = kv.substr(eq + 1);
          if (key == "n") gs.n = std::stoi(val);
          else if (key == "p") gs.p = std::stod(val);
          else if (key == "degree") gs.degree = std::stod(val);
          else if (key == "m") gs.m = std::stoi(val);
          else if (key == "communities") gs.communities = std::stoi(val);
          else if (key == "p_in") gs.p_in = std::stod(val);
          else if (key == "p_out") gs.p_out = std::stod(val);
          else if (key == "k") gs.k_nearest = std::stoi(val);
          else if (key == "branches") gs.branches = std::stoi(val);
          else if (key == "tail") gs.tail = std::stoi(val);
          else if (key == "width") gs.width = std::stoi(val);
          else if (key == "height") gs.height = std::stoi(val);
          else if (key == "seed") gs.seed = std::stoull(val);
          else throw fs::InputError("unknown generator key '" + key + "'");
        }
      }
      cfg.generator = gs;
    }
    fs::SpectralReport rep = fs::estimate_cdf(cfg);
    {
      auto out = open_out(out_path);
      fs::write_report_csv(rep, out);
    }
    {
      auto out = open_out(out_path + ".json");
      fs::write_report_json(rep, out);
    }
    if (rep.moment_table) {
      auto out = open_out(out_path + ".moments.csv");
      fs::write_moments_csv(*rep.moment_table, out);
    }
    for (std::size_t i = 0; i < rep.sub_reports.size(); ++i) {
      auto out = open_out(out_path + ".l" + std::to_string(i + 1) + ".csv");
      fs::write_report_csv(rep.sub_reports[i], out);
    }
    std::cerr << "wrote " << out_path << " (" << rep.rows.size()
              << " grid points)\n";
    return kExitOk;
  }

  if (gen->parsed()) {
    fs::WeightedGraph g = fs::generate_graph(gspec);
    fs::write_edge_list(g, gen_out);
    std::cerr << "wrote " << gen_out << " (n=" << g.node_count()
              << " m=" << g.edge_count() << ")\n";
    return kExitOk;
  }

  if (exact->parsed()) {
    fs::WeightedGraph g =
        fs::load_graph(exact_graph, parse_format(exact_format)).graph;
    fs::ExactSpectrum sp = fs::exact_spectrum(g, exact_cap);
    std::ostringstream body;
    body << "index,eigenvalue\n";
    for (std::size_t i = 0; i < sp.eigenvalues.size(); ++i)
      body << i << ',' << fmt17(sp.eigenvalues[i]) << '\n';
    if (exact_out.empty()) std::cout << body.str();
    else open_out(exact_out) << body.str();
    return kExitOk;
  }

  if (bench->parsed()) {
    fs::WeightedGraph g =
        fs::load_graph(bench_graph, parse_format(bench_format)).graph;
    if (bench_q0 <= 0.0) bench_q0 = 0.01 * g.scalars().lambda_bar;
    fs::BenchResult r = fs::bench_costs(g, bench_q0, bench_traj, bench_seed);
    std::ostringstream body;
    body << "n,q0,trajectories,mean_S,stderr_S,mean_R,bound_S,bound_R,"
            "exact_S,seconds_per_trajectory\n";
    body << g.node_count() << ',' << fmt17(bench_q0) << ',' << r.trajectories
         << ',' << fmt17(r.mean_sampled) << ',' << fmt17(r.stderr_sampled)
         << ',' << fmt17(r.mean_rereads) << ',' << fmt17(r.bound_sampled)
         << ',' << fmt17(r.bound_rereads) << ','
         << (r.exact_available ? fmt17(r.exact_sampled) : std::string())
         << ',' << fmt17(r.seconds_per_trajectory) << '\n';
    if (bench_out.empty()) std::cout << body.str();
    else open_out(bench_out) << body.str();
    return kExitOk;
  }

  if (embed->parsed()) {
    fs::SymmetricMatrix m = fs::load_symmetric_matrix(embed_matrix);
    fs::ShiftedMatrix shifted = fs::shift_to_dominant(m, embed_extra);
    fs::CoverPair cover = fs::double_cover(shifted.matrix, shifted.shift);
    fs::write_edge_list(cover.l1, embed_prefix + ".l1.edges");
    fs::write_edge_list(cover.l2, embed_prefix + ".l2.edges");
    nlohmann::ordered_json meta;
    meta["n"] = m.n;
    meta["shift"] = shifted.shift;
    meta["l1"] = embed_prefix + ".l1.edges";
    meta["l2"] = embed_prefix + ".l2.edges";
    meta["note"] =
        "eigenvalues of -M are eigenvalues of -M' minus the shift; "
        "F_M(q - shift) = F_M'(q) and F_M' = 2 F_l2 - F_l1";
    open_out(embed_prefix + ".meta.json") << meta.dump(2) << "\n";
    std::cerr << "wrote " << embed_prefix << ".{l1,l2}.edges (shift="
              << shifted.shift << ")\n";
    return kExitOk;
  }

  if (mcheck->parsed()) {
    std::ifstream in(mcheck_json);
    if (!in) throw fs::InputError("cannot open '" + mcheck_json + "'");
    nlohmann::json j;
    in >> j;
    const double a = j.at("a").get<double>();
    const double b = j.at("b").get<double>();
    std::vector<double> m = j.at("moments").get<std::vector<double>>();
    std::vector<double> radii =
        j.contains("radii") ? j.at("radii").get<std::vector<double>>()
                            : std::vector<double>(m.size(), 0.0);
    const int k_valid = fs::validate_sequence(a, b, m, radii);
    nlohmann::ordered_json out;
    out["k_valid"] = k_valid;
    fs::MomentSequence ms{a, b, {1.0}};
    for (int k = 0; k < k_valid; ++k) ms.moments.push_back(m[k]);
    try {
      auto win = fs::admissible_interval(ms);
      out["next_moment_interval"] = {win.first, win.second};
    } catch (const fs::NumericalDegeneracy&) {
      out["next_moment_interval"] = nullptr;
      out["singular"] = true;
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  }

  if (sample->parsed()) {
    fs::WeightedGraph g =
        fs::load_graph(sample_graph, parse_format(sample_format)).graph;
    std::vector<double> grid;
    if (sample_grid.empty()) {
      grid = {sample_qmin, sample_qmax};
    } else {
      std::stringstream ss(sample_grid);
      std::string tok;
      while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
      std::sort(grid.begin(), grid.end());
    }
    fs::NeighborSampler ns(g);
    fs::Rng rng = fs::Rng::stream(sample_seed, 0, 0);
    fs::TrajectoryOptions opt;
    opt.keep_qmax_forest = true;
    fs::Trajectory tr = fs::coupled_trajectory(g, ns, sample_qmin, sample_qmax,
                                               grid, rng, opt);
    nlohmann::ordered_json out;
    out["n"] = g.node_count();
    out["q_min"] = sample_qmin;
    out["q_max"] = sample_qmax;
    out["cost"] = {{"sampled", tr.cost.sampled}, {"rereads", tr.cost.rereads}};
    nlohmann::ordered_json snaps = nlohmann::ordered_json::array();
    for (const auto& s : tr.snapshots) {
      nlohmann::ordered_json snap;
      snap["q"] = s.q;
      snap["root"] = s.roots.root;
      if (g.has_killing()) snap["mark_rooted"] = s.roots.mark_rooted;
      snaps.push_back(snap);
    }
    out["snapshots"] = snaps;
    out["next_at_qmax"] = tr.forest_at_qmax.next;
    if (sample_out.empty()) std::cout << out.dump(2) << "\n";
    else open_out(sample_out) << out.dump(2) << "\n";
    return kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const fs::NumericalDegeneracy& e) {
    std::cerr << "numerical degeneracy: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
