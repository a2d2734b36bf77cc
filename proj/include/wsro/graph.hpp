#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wsro/error.hpp"
#include "wsro/grid.hpp"

namespace wsro {

using Weight = std::int64_t;

// Directed edge list in struct-of-arrays form.
struct EdgeListGraph {
  std::uint32_t vertex_count = 0;
  std::vector<std::uint32_t> u;
  std::vector<std::uint32_t> v;
  std::vector<Weight> w;

  std::size_t edge_count() const noexcept { return u.size(); }

  void add_edge(std::uint32_t from, std::uint32_t to, Weight weight) {
    if (from >= vertex_count || to >= vertex_count)
      throw ConfigError("edge (" + std::to_string(from) + "," + std::to_string(to) +
                        ") outside vertex range " + std::to_string(vertex_count));
    u.push_back(from);
    v.push_back(to);
    w.push_back(weight);
  }

  void validate() const {
    if (u.size() != v.size() || u.size() != w.size())
      throw ConfigError("edge arrays differ in length");
    for (std::size_t e = 0; e < u.size(); ++e)
      if (u[e] >= vertex_count || v[e] >= vertex_count)
        throw ConfigError("edge " + std::to_string(e) + " has an endpoint outside the graph");
  }
};

// Unit-weight 4-neighbour grid over the floor plane, one vertex per stop
// (vertex index from stop_vertex). Both directions of every aisle step are
// present.
inline EdgeListGraph build_grid_graph(const GridDims& dims) {
  dims.validate();
  EdgeListGraph g;
  g.vertex_count = static_cast<std::uint32_t>(dims.rack_count());
  const std::size_t horizontal = static_cast<std::size_t>(dims.nx - 1) * dims.ny;
  const std::size_t vertical = static_cast<std::size_t>(dims.ny - 1) * dims.nx;
  const std::size_t e = 2 * (horizontal + vertical);
  g.u.reserve(e);
  g.v.reserve(e);
  g.w.reserve(e);
  for (int j = 1; j <= dims.ny; ++j)
    for (int i = 1; i <= dims.nx; ++i) {
      const auto a = static_cast<std::uint32_t>(stop_vertex(dims, {i, j}));
      if (i < dims.nx) {
        const auto b = static_cast<std::uint32_t>(stop_vertex(dims, {i + 1, j}));
        g.add_edge(a, b, 1);
        g.add_edge(b, a, 1);
      }
      if (j < dims.ny) {
        const auto b = static_cast<std::uint32_t>(stop_vertex(dims, {i, j + 1}));
        g.add_edge(a, b, 1);
        g.add_edge(b, a, 1);
      }
    }
  return g;
}

// Text form: "V E" header, then one "u v w" line per edge.
inline void write_edge_list(std::ostream& os, const EdgeListGraph& g) {
  os << g.vertex_count << ' ' << g.edge_count() << '\n';
  for (std::size_t e = 0; e < g.edge_count(); ++e) os << g.u[e] << ' ' << g.v[e] << ' ' << g.w[e] << '\n';
}

inline EdgeListGraph read_edge_list(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++lineno;
      const auto p = line.find_first_not_of(" \t\r");
      if (p != std::string::npos && line[p] != '#') return true;
    }
    return false;
  };
  auto fail = [&](const std::string& what) {
    throw DecodeError("edge list line " + std::to_string(lineno) + ": " + what);
  };

  if (!next_line()) throw DecodeError("edge list is empty");
  long long vc = -1, ec = -1;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> vc >> ec) || (hs >> extra) || vc < 0 || ec < 0) fail("expected 'V E' header");
    if (vc > static_cast<long long>(UINT32_MAX)) fail("vertex count too large");
  }
  EdgeListGraph g;
  g.vertex_count = static_cast<std::uint32_t>(vc);
  g.u.reserve(static_cast<std::size_t>(ec));
  g.v.reserve(static_cast<std::size_t>(ec));
  g.w.reserve(static_cast<std::size_t>(ec));
  for (long long e = 0; e < ec; ++e) {
    if (!next_line()) throw DecodeError("edge list truncated: expected " + std::to_string(ec) +
                                        " edges, got " + std::to_string(e));
    std::istringstream ls(line);
    long long a = -1, b = -1;
    Weight w = 0;
    std::string extra;
    if (!(ls >> a >> b >> w) || (ls >> extra)) fail("expected 'u v w'");
    if (a < 0 || b < 0 || a >= vc || b >= vc) fail("endpoint outside [0, V)");
    g.add_edge(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), w);
  }
  if (next_line()) fail("more edges than the header declares");
  return g;
}

}  // namespace wsro
