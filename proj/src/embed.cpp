#include "forest_spectra/embed.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace forest_spectra {

double SymmetricMatrix::diagonal(std::int32_t x) const {
  double d = 0.0;
  for (const Entry& e : entries)
    if (e.row == x && e.col == x) d += e.value;
  return d;
}

std::vector<double> SymmetricMatrix::dense_row_major() const {
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  for (const Entry& e : entries) {
    m[static_cast<std::size_t>(e.row) * n + e.col] += e.value;
    if (e.row != e.col)
      m[static_cast<std::size_t>(e.col) * n + e.row] += e.value;
  }
  return m;
}

SymmetricMatrix parse_matrix_market_symmetric(std::istream& in,
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
  if (field != "real" && field != "integer")
    throw InputError(name + ": matrix input must be real coordinate");
  const bool symmetric_storage = symmetry == "symmetric";
  if (!symmetric_storage && symmetry != "general")
    throw InputError(name + ": unsupported symmetry '" + symmetry + "'");

  std::string line;
  std::int64_t rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '%') continue;
    std::istringstream ls(line);
    if (!(ls >> rows >> cols >> nnz))
      throw InputError(name + ": malformed size line");
    break;
  }
  if (rows < 0 || rows != cols)
    throw InputError(name + ": matrix must be square");

  std::map<std::pair<std::int32_t, std::int32_t>, double> acc;
  std::map<std::pair<std::int32_t, std::int32_t>, double> general_entries;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    std::int64_t i, j;
    double v;
    if (!(ls >> i >> j >> v)) throw InputError(name + ": malformed entry");
    if (i < 1 || i > rows || j < 1 || j > rows)
      throw InputError(name + ": index out of range");
    auto r = static_cast<std::int32_t>(i - 1);
    auto c = static_cast<std::int32_t>(j - 1);
    if (symmetric_storage) {
      if (c > r) std::swap(r, c);
      acc[{c, r}] += v;  // store (min,max)
    } else {
      general_entries[{r, c}] += v;
    }
  }
  if (!symmetric_storage) {
    // Both triangles must be present and agree to 1e-12.
    for (const auto& [key, v] : general_entries) {
      auto [r, c] = key;
      if (r == c) {
        acc[{r, c}] += v;
        continue;
      }
      auto it = general_entries.find({c, r});
      const double other = it == general_entries.end() ? 0.0 : it->second;
      const double scale = std::max({std::abs(v), std::abs(other), 1.0});
      if (std::abs(v - other) > 1e-12 * scale)
        throw InputError(name + ": matrix is not symmetric at (" +
                         std::to_string(r) + "," + std::to_string(c) + ")");
      if (r < c) acc[{r, c}] += v;  // keep one triangle
    }
  }
  SymmetricMatrix m;
  m.n = static_cast<std::int32_t>(rows);
  for (const auto& [key, v] : acc)
    m.entries.push_back({key.first, key.second, v});
  return m;
}

SymmetricMatrix load_symmetric_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_matrix_market_symmetric(in, path);
}

ShiftedMatrix shift_to_dominant(const SymmetricMatrix& m, double extra_shift) {
  if (extra_shift < 0.0)
    throw InputError("extra shift must be nonnegative");
  std::vector<double> diag(m.n, 0.0), offsum(m.n, 0.0);
  for (const auto& e : m.entries) {
    if (e.row == e.col) {
      diag[e.row] += e.value;
    } else {
      offsum[e.row] += std::abs(e.value);
      offsum[e.col] += std::abs(e.value);
    }
  }
  double c = 0.0;
  for (std::int32_t x = 0; x < m.n; ++x)
    c = std::max(c, diag[x] + offsum[x]);
  c += extra_shift;
  ShiftedMatrix out;
  out.shift = c;
  out.matrix = m;
  if (c != 0.0) {
    // Merge the -c into existing diagonal entries (adding missing ones).
    std::vector<bool> seen(m.n, false);
    for (auto& e : out.matrix.entries)
      if (e.row == e.col) {
        e.value -= c;
        seen[e.row] = true;
      }
    for (std::int32_t x = 0; x < m.n; ++x)
      if (!seen[x]) out.matrix.entries.push_back({x, x, -c});
  }
  return out;
}

WeightedGraph make_sub_laplacian(const SymmetricMatrix& m_prime) {
  std::vector<Edge> edges;
  std::vector<double> diag(m_prime.n, 0.0), offsum(m_prime.n, 0.0);
  for (const auto& e : m_prime.entries) {
    if (e.row == e.col) {
      diag[e.row] += e.value;
      continue;
    }
    if (e.value < 0.0)
      throw InputError("sub-Laplacian requires nonnegative off-diagonals");
    if (e.value == 0.0) continue;
    edges.push_back({e.row, e.col, e.value});
    offsum[e.row] += e.value;
    offsum[e.col] += e.value;
  }
  std::vector<double> kill(m_prime.n, 0.0);
  for (std::int32_t x = 0; x < m_prime.n; ++x) {
    kill[x] = -diag[x] - offsum[x];
    if (kill[x] < 0.0) {
      if (kill[x] > -1e-12 * std::max(1.0, offsum[x]))
        kill[x] = 0.0;  // roundoff from the shift
      else
        throw InputError("matrix is not diagonally dominant at node " +
                         std::to_string(x));
    }
  }
  return WeightedGraph::from_edges(m_prime.n, edges, std::move(kill));
}

CoverPair double_cover(const SymmetricMatrix& m_prime, double shift) {
  const std::int32_t n = m_prime.n;
  std::vector<Edge> e1, e2;
  std::vector<double> diag(n, 0.0);
  std::vector<double> offsum(n, 0.0);
  for (const auto& e : m_prime.entries) {
    if (e.row == e.col) {
      diag[e.row] += e.value;
      continue;
    }
    const double pos = std::max(e.value, 0.0);
    const double neg = std::max(-e.value, 0.0);
    const double mag = std::abs(e.value);
    if (mag == 0.0) continue;
    e1.push_back({e.row, e.col, mag});
    if (pos > 0.0) {
      e2.push_back({e.row, e.col, pos});
      e2.push_back({e.row + n, e.col + n, pos});
    }
    if (neg > 0.0) {
      e2.push_back({e.row, e.col + n, neg});
      e2.push_back({e.col, e.row + n, neg});
    }
    offsum[e.row] += mag;
    offsum[e.col] += mag;
  }
  std::vector<double> kill1(n, 0.0);
  for (std::int32_t x = 0; x < n; ++x) {
    kill1[x] = -diag[x] - offsum[x];
    if (kill1[x] < 0.0) {
      if (kill1[x] > -1e-12 * std::max(1.0, offsum[x]))
        kill1[x] = 0.0;
      else
        throw InputError("double cover requires a dominant matrix (node " +
                         std::to_string(x) + ")");
    }
  }
  std::vector<double> kill2(2 * n, 0.0);
  for (std::int32_t x = 0; x < n; ++x) kill2[x] = kill2[x + n] = kill1[x];
  CoverPair out;
  out.shift = shift;
  out.l1 = WeightedGraph::from_edges(n, e1, std::move(kill1));
  out.l2 = WeightedGraph::from_edges(2 * n, e2, std::move(kill2));
  return out;
}

std::vector<double> combine_cdfs(std::span<const double> f1,
                                 std::span<const double> f2) {
  if (f1.size() != f2.size())
    throw InputError("combine_cdfs: mismatched grids");
  std::vector<double> f(f1.size());
  for (std::size_t i = 0; i < f1.size(); ++i)
    f[i] = std::clamp(2.0 * f2[i] - f1[i], 0.0, 1.0);
  return f;
}

std::vector<double> isotonic_non_decreasing(std::span<const double> v) {
  // PAVA with unit weights.
  std::vector<double> level;
  std::vector<int> count;
  for (double x : v) {
    level.push_back(x);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      const double merged =
          (level[level.size() - 2] * count[count.size() - 2] +
           level.back() * count.back()) /
          (count[count.size() - 2] + count.back());
      count[count.size() - 2] += count.back();
      level[level.size() - 2] = merged;
      level.pop_back();
      count.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < level.size(); ++i)
    out.insert(out.end(), count[i], level[i]);
  return out;
}

}  // namespace forest_spectra
