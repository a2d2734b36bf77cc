// Reports Bellman-Ford relaxation throughput on warehouse grids. Never fails.

#include <chrono>
#include <cstdio>
#include <vector>

#include "wsro/bellman_ford.hpp"
#include "wsro/grid.hpp"

using namespace wsro;

int main() {
  for (const GridDims d : {GridDims{10, 10, 1}, GridDims{100, 100, 1}}) {
    const auto g = build_grid_graph(d);
    std::vector<std::uint32_t> sources;
    for (std::uint32_t s = 0; s < 10; ++s) sources.push_back(s * (g.vertex_count / 10));
    const auto t0 = std::chrono::steady_clock::now();
    const auto sp = bellman_ford(g, sources);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double relaxed = static_cast<double>(sp.relaxations);
    std::printf("grid %dx%d: %zu edges, %zu sources, %zu rounds, %.3f s, %.3g edges relaxed/s\n", d.nx, d.ny,
                g.edge_count(), sources.size(), static_cast<std::size_t>(sp.rounds), secs,
                secs > 0 ? relaxed / secs : 0.0);
  }
  return 0;
}
