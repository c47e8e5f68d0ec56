#pragma once

#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "distcolor/coloring.hpp"
#include "distcolor/graph.hpp"
#include "distcolor/types.hpp"

namespace distcolor {

namespace detail {
inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}
}  // namespace detail

/// Reads a Matrix Market coordinate file as an undirected simple graph.
/// Accepts pattern/real/integer fields and general/symmetric symmetry.
/// Numeric values are discarded; self-loops dropped; duplicate entries and
/// general-form mirror pairs merge into single undirected edges.
inline Graph load_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("mtx: empty stream");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError("mtx: missing %%MatrixMarket banner");
  if (detail::lower(object) != "matrix" || detail::lower(format) != "coordinate")
    throw ParseError("mtx: expected 'matrix coordinate' header");
  field = detail::lower(field);
  if (field != "pattern" && field != "real" && field != "integer")
    throw ParseError("mtx: unsupported field '" + field + "'");
  symmetry = detail::lower(symmetry);
  if (symmetry != "general" && symmetry != "symmetric")
    throw ParseError("mtx: unsupported symmetry '" + symmetry + "'");

  std::uint64_t rows = 0, cols = 0, nnz = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream sizes(line);
    if (!(sizes >> rows >> cols >> nnz)) throw ParseError("mtx: malformed size line");
    break;
  }
  if (rows == 0 || cols == 0) throw ParseError("mtx: empty graph");
  if (rows != cols) throw ParseError("mtx: matrix is not square");

  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(nnz);
  std::uint64_t seen = 0;
  while (seen < nnz && std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    std::uint64_t i = 0, j = 0;
    if (!(entry >> i >> j)) throw ParseError("mtx: malformed entry line");
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw ParseError("mtx: index out of declared bounds");
    ++seen;
    // 1-based in the file, 0-based internally.
    edges.emplace_back(static_cast<VertexId>(i - 1), static_cast<VertexId>(j - 1));
  }
  if (seen != nnz) throw ParseError("mtx: fewer entries than declared");
  return Graph::from_edges(static_cast<VertexId>(rows), edges);
}

/// Reads a plain edge list: one `u v` pair per line, 0-based, '#' comments.
/// Vertex count is max id + 1.
inline Graph load_edge_list(std::istream& in) {
  std::vector<std::pair<VertexId, VertexId>> edges;
  VertexId n = 0;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream entry(line);
    std::uint64_t u = 0, v = 0;
    if (!(entry >> u >> v))
      throw ParseError("edge list: malformed line " + std::to_string(lineno));
    n = std::max<VertexId>(n, static_cast<VertexId>(std::max(u, v)) + 1);
    edges.emplace_back(static_cast<VertexId>(u), static_cast<VertexId>(v));
  }
  if (n == 0) throw ParseError("edge list: empty graph");
  return Graph::from_edges(n, edges);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  g.for_each_edge([&](VertexId u, VertexId v) { out << u << ' ' << v << '\n'; });
}

/// One `vertex color` pair per line; colors are 1-based in the dump.
inline void write_coloring(std::ostream& out, const Coloring& c) {
  for (VertexId v = 0; v < c.values.size(); ++v)
    out << v << ' ' << c.values[v] << '\n';
}

}  // namespace distcolor
