#include "forest_spectra/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace forest_spectra {

namespace {

bool parse_index(const std::string& tok, std::int64_t& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && out >= 0;
}

double parse_weight(const std::string& tok, const std::string& name,
                    std::int64_t line) {
  try {
    std::size_t pos = 0;
    double w = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return w;
  } catch (const std::exception&) {
    throw InputError(name + ":" + std::to_string(line) +
                     ": cannot parse weight '" + tok + "'");
  }
}

}  // namespace

WeightedGraph WeightedGraph::from_edges(std::int32_t n,
                                        std::span<const Edge> edges,
                                        std::vector<double> kill) {
  if (n < 0) throw InputError("negative node count");
  if (!kill.empty() && static_cast<std::int32_t>(kill.size()) != n)
    throw InputError("kill weight vector size mismatch");
  for (std::int32_t x = 0; x < static_cast<std::int32_t>(kill.size()); ++x) {
    if (!(kill[x] >= 0.0) || !std::isfinite(kill[x]))
      throw InputError("kill weight of node " + std::to_string(x) +
                       " is negative or non-finite");
  }

  // Merge duplicates; store each undirected edge once keyed by (min,max).
  std::map<std::pair<std::int32_t, std::int32_t>, double> merged;
  for (const Edge& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw InputError("edge endpoint out of range");
    if (e.u == e.v)
      throw InputError("self-loop at node " + std::to_string(e.u));
    if (!(e.w >= 0.0) || !std::isfinite(e.w))
      throw InputError("negative or non-finite weight on edge " +
                       std::to_string(e.u) + "-" + std::to_string(e.v));
    auto key = std::minmax(e.u, e.v);
    merged[{key.first, key.second}] += e.w;
  }

  WeightedGraph g;
  g.n_ = n;
  g.kill_ = std::move(kill);
  g.has_killing_ =
      std::any_of(g.kill_.begin(), g.kill_.end(), [](double d) { return d > 0.0; });
  if (!g.has_killing_) g.kill_.clear();

  std::vector<std::int32_t> deg(n, 0);
  for (const auto& [key, w] : merged) {
    if (w == 0.0) continue;  // explicit zero weight: no edge
    ++deg[key.first];
    ++deg[key.second];
  }
  g.offset_.assign(n + 1, 0);
  for (std::int32_t x = 0; x < n; ++x) g.offset_[x + 1] = g.offset_[x] + deg[x];
  g.adj_.resize(g.offset_[n]);
  g.wgt_.resize(g.offset_[n]);
  std::vector<std::int32_t> cursor(g.offset_.begin(), g.offset_.end() - 1);
  for (const auto& [key, w] : merged) {
    if (w == 0.0) continue;
    auto [u, v] = key;
    g.adj_[cursor[u]] = v;
    g.wgt_[cursor[u]++] = w;
    g.adj_[cursor[v]] = u;
    g.wgt_[cursor[v]++] = w;
    ++g.m_;
  }
  g.node_weight_.assign(n, 0.0);
  for (std::int32_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (double w : g.weights(x)) s += w;
    g.node_weight_[x] = s;
  }
  return g;
}

GraphScalars WeightedGraph::scalars() const {
  GraphScalars s;
  double max_kill = 0.0;
  double acc = 0.0;
  for (std::int32_t x = 0; x < n_; ++x) {
    s.alpha = std::max(s.alpha, node_weight_[x]);
    max_kill = std::max(max_kill, kill_weight(x));
    acc += total_weight(x);
  }
  s.lambda_bar = n_ > 0 ? acc / n_ : 0.0;
  s.spectral_upper = 2.0 * s.alpha + max_kill;
  return s;
}

std::uint64_t WeightedGraph::structure_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  feed(static_cast<std::uint64_t>(n_));
  for (std::int32_t x = 0; x < n_; ++x) {
    auto nb = neighbors(x);
    auto ws = weights(x);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (nb[i] < x) continue;
      feed(static_cast<std::uint64_t>(x));
      feed(static_cast<std::uint64_t>(nb[i]));
      std::uint64_t bits;
      std::memcpy(&bits, &ws[i], 8);
      feed(bits);
    }
    if (kill_weight(x) > 0.0) {
      std::uint64_t bits;
      double d = kill_weight(x);
      std::memcpy(&bits, &d, 8);
      feed(bits);
    }
  }
  return h;
}

LoadedGraph parse_edge_list(std::istream& in, const std::string& name) {
  std::vector<std::tuple<std::string, std::string, double>> raw_edges;
  std::vector<std::pair<std::string, double>> raw_kill;
  std::int64_t declared_n = -1;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == "n") {
      if (tok.size() != 2 || !parse_index(tok[1], declared_n))
        throw InputError(name + ":" + std::to_string(lineno) +
                         ": malformed header line");
      continue;
    }
    if (tok[0] == "k") {
      if (tok.size() != 3)
        throw InputError(name + ":" + std::to_string(lineno) +
                         ": malformed killing line");
      double d = parse_weight(tok[2], name, lineno);
      if (d < 0.0)
        throw InputError(name + ":" + std::to_string(lineno) +
                         ": negative killing weight");
      raw_kill.emplace_back(tok[1], d);
      continue;
    }
    if (tok.size() != 2 && tok.size() != 3)
      throw InputError(name + ":" + std::to_string(lineno) +
                       ": expected 'u v [w]'");
    double w = tok.size() == 3 ? parse_weight(tok[2], name, lineno) : 1.0;
    if (w < 0.0)
      throw InputError(name + ":" + std::to_string(lineno) +
                       ": negative weight");
    raw_edges.emplace_back(tok[0], tok[1], w);
  }

  // Dense integer ids are kept as-is; anything else is remapped by order of
  // first appearance and the label map is returned.
  bool numeric = true;
  std::int64_t max_id = declared_n - 1;
  for (const auto& [a, b, w] : raw_edges) {
    std::int64_t ia, ib;
    if (!parse_index(a, ia) || !parse_index(b, ib)) {
      numeric = false;
      break;
    }
    max_id = std::max({max_id, ia, ib});
  }
  if (numeric)
    for (const auto& [a, d] : raw_kill) {
      std::int64_t ia;
      if (!parse_index(a, ia)) {
        numeric = false;
        break;
      }
      max_id = std::max(max_id, ia);
    }

  LoadedGraph out;
  std::vector<Edge> edges;
  std::vector<double> kill;
  std::int32_t n = 0;
  if (numeric) {
    if (declared_n >= 0 && max_id >= declared_n)
      throw InputError(name + ": node id " + std::to_string(max_id) +
                       " exceeds declared n=" + std::to_string(declared_n));
    n = static_cast<std::int32_t>(max_id + 1);
    for (const auto& [a, b, w] : raw_edges) {
      std::int64_t ia, ib;
      parse_index(a, ia);
      parse_index(b, ib);
      edges.push_back({static_cast<std::int32_t>(ia),
                       static_cast<std::int32_t>(ib), w});
    }
    if (!raw_kill.empty()) {
      kill.assign(n, 0.0);
      for (const auto& [a, d] : raw_kill) {
        std::int64_t ia;
        parse_index(a, ia);
        kill[static_cast<std::size_t>(ia)] += d;
      }
    }
  } else {
    std::map<std::string, std::int32_t> ids;
    auto intern = [&](const std::string& s) {
      auto it = ids.find(s);
      if (it != ids.end()) return it->second;
      std::int32_t id = static_cast<std::int32_t>(out.labels.size());
      ids.emplace(s, id);
      out.labels.push_back(s);
      return id;
    };
    for (const auto& [a, b, w] : raw_edges)
      edges.push_back({intern(a), intern(b), w});
    std::vector<std::pair<std::int32_t, double>> mapped_kill;
    for (const auto& [a, d] : raw_kill) mapped_kill.emplace_back(intern(a), d);
    n = static_cast<std::int32_t>(out.labels.size());
    if (!mapped_kill.empty()) {
      kill.assign(n, 0.0);
      for (auto [x, d] : mapped_kill) kill[x] += d;
    }
  }
  out.graph = WeightedGraph::from_edges(n, edges, std::move(kill));
  return out;
}

LoadedGraph parse_matrix_market_graph(std::istream& in,
                                      const std::string& name) {
  std::string header;
  if (!std::getline(in, header))
    throw InputError(name + ": empty matrix-market file");
  std::istringstream hs(header);
  std::string banner, object, fmt, field, symmetry;
  hs >> banner >> object >> fmt >> field >> symmetry;
  for (auto* s : {&object, &fmt, &field, &symmetry})
    std::transform(s->begin(), s->end(), s->begin(),
                   [](unsigned char c) { return std::tolower(c); });
  if (banner != "%%MatrixMarket" || object != "matrix" || fmt != "coordinate")
    throw InputError(name + ": expected '%%MatrixMarket matrix coordinate'");
  if (field != "real" && field != "pattern" && field != "integer")
    throw InputError(name + ": unsupported field '" + field + "'");
  if (symmetry != "symmetric")
    throw InputError(name + ": graph input requires symmetric matrix-market");
  bool pattern = field == "pattern";

  std::string line;
  std::int64_t lineno = 1;
  std::int64_t rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    std::istringstream ls(line);
    if (!(ls >> rows >> cols >> nnz))
      throw InputError(name + ":" + std::to_string(lineno) +
                       ": malformed size line");
    break;
  }
  if (rows < 0 || rows != cols)
    throw InputError(name + ": matrix must be square");

  std::vector<Edge> edges;
  std::int64_t seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    std::int64_t i, j;
    double v = 1.0;
    if (!(ls >> i >> j) || (!pattern && !(ls >> v)))
      throw InputError(name + ":" + std::to_string(lineno) +
                       ": malformed entry");
    if (i < 1 || i > rows || j < 1 || j > rows)
      throw InputError(name + ":" + std::to_string(lineno) +
                       ": index out of range");
    if (i == j)
      throw InputError(name + ":" + std::to_string(lineno) +
                       ": self-loop (diagonal entry) not allowed in graphs");
    if (v < 0.0)
      throw InputError(name + ":" + std::to_string(lineno) +
                       ": negative weight");
    edges.push_back({static_cast<std::int32_t>(i - 1),
                     static_cast<std::int32_t>(j - 1), v});
    ++seen;
  }
  if (nnz >= 0 && seen != nnz)
    throw InputError(name + ": entry count " + std::to_string(seen) +
                     " does not match declared " + std::to_string(nnz));
  LoadedGraph out;
  out.graph =
      WeightedGraph::from_edges(static_cast<std::int32_t>(rows), edges);
  return out;
}

LoadedGraph load_graph(const std::string& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return format == GraphFormat::kEdgeList
             ? parse_edge_list(in, path)
             : parse_matrix_market_graph(in, path);
}

void write_edge_list(const WeightedGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  char buf[80];
  out << "n " << g.node_count() << "\n";
  for (std::int32_t x = 0; x < g.node_count(); ++x) {
    auto nb = g.neighbors(x);
    auto ws = g.weights(x);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (nb[i] < x) continue;
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", x, nb[i], ws[i]);
      out << buf;
    }
  }
  for (std::int32_t x = 0; x < g.node_count(); ++x) {
    if (g.kill_weight(x) > 0.0) {
      std::snprintf(buf, sizeof buf, "k %d %.17g\n", x, g.kill_weight(x));
      out << buf;
    }
  }
}

}  // namespace forest_spectra
