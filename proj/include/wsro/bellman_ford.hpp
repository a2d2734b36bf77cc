#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "wsro/error.hpp"
#include "wsro/graph.hpp"

namespace wsro {

inline constexpr Weight kUnreachable = std::numeric_limits<Weight>::max();
inline constexpr std::int64_t kNoPred = -1;

// In-edges grouped by destination, original edge order kept within a group.
struct InEdges {
  std::vector<std::size_t> offset;  // V + 1
  std::vector<std::uint32_t> from;
  std::vector<Weight> weight;

  explicit InEdges(const EdgeListGraph& g) : offset(g.vertex_count + 1, 0) {
    for (auto dst : g.v) ++offset[dst + 1];
    for (std::size_t x = 1; x < offset.size(); ++x) offset[x] += offset[x - 1];
    from.resize(g.edge_count());
    weight.resize(g.edge_count());
    std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const auto slot = fill[g.v[e]]++;
      from[slot] = g.u[e];
      weight[slot] = g.w[e];
    }
  }
};

// Distances and predecessors for a batch of sources, stored source-major.
struct ShortestPaths {
  std::uint32_t vertex_count = 0;
  std::vector<std::uint32_t> sources;
  std::vector<Weight> dist;
  std::vector<std::int64_t> pred;
  std::size_t rounds = 0;           // relaxation rounds performed
  std::uint64_t relaxations = 0;    // edge relaxations performed

  Weight distance(std::size_t s, std::uint32_t v) const { return dist.at(s * vertex_count + v); }
  std::int64_t predecessor(std::size_t s, std::uint32_t v) const {
    return pred.at(s * vertex_count + v);
  }
  bool reachable(std::size_t s, std::uint32_t v) const { return distance(s, v) != kUnreachable; }

  // Vertices from sources[s] to v; empty when v is unreachable.
  std::vector<std::uint32_t> path(std::size_t s, std::uint32_t v) const {
    std::vector<std::uint32_t> p;
    if (!reachable(s, v)) return p;
    std::int64_t cur = v;
    while (cur != kNoPred && p.size() <= vertex_count) {
      p.push_back(static_cast<std::uint32_t>(cur));
      if (static_cast<std::uint32_t>(cur) == sources[s]) break;
      cur = predecessor(s, static_cast<std::uint32_t>(cur));
    }
    std::reverse(p.begin(), p.end());
    return p;
  }
};

// Multi-source Bellman-Ford. Each round relaxes every edge for every source
// against the previous round's distances; a vertex takes the smallest
// candidate over its in-edges, first in-edge winning ties, so the result
// does not depend on thread count. Stops early when a round changes
// nothing. A change in round V means a reachable negative cycle.
inline ShortestPaths bellman_ford(const EdgeListGraph& g, std::span<const std::uint32_t> sources) {
  g.validate();
  const std::uint32_t V = g.vertex_count;
  for (auto s : sources)
    if (s >= V) throw NotFoundError("source vertex " + std::to_string(s) + " not in graph");

  ShortestPaths sp;
  sp.vertex_count = V;
  sp.sources.assign(sources.begin(), sources.end());
  const std::size_t S = sources.size();
  const std::size_t total = S * V;
  sp.dist.assign(total, kUnreachable);
  sp.pred.assign(total, kNoPred);
  for (std::size_t s = 0; s < S; ++s) sp.dist[s * V + sources[s]] = 0;
  if (S == 0 || V == 0) return sp;

  const InEdges in(g);
  std::vector<Weight> next(total);
  std::vector<std::int64_t> next_pred(total);

  for (std::uint32_t round = 1; round <= V; ++round) {
    int changed = 0;
    const auto n = static_cast<long long>(total);
#pragma omp parallel for schedule(static) reduction(| : changed)
    for (long long x = 0; x < n; ++x) {
      const auto idx = static_cast<std::size_t>(x);
      const std::size_t base = idx - idx % V;
      const auto v = static_cast<std::uint32_t>(idx % V);
      Weight best = sp.dist[idx];
      std::int64_t bp = sp.pred[idx];
      for (std::size_t e = in.offset[v]; e < in.offset[v + 1]; ++e) {
        const Weight du = sp.dist[base + in.from[e]];
        if (du == kUnreachable) continue;
        const Weight cand = du + in.weight[e];
        if (cand < best) {
          best = cand;
          bp = in.from[e];
        }
      }
      next[idx] = best;
      next_pred[idx] = bp;
      if (best != sp.dist[idx]) changed = 1;
    }
    sp.rounds = round;
    sp.relaxations += static_cast<std::uint64_t>(S) * g.edge_count();

    if (changed && round == V) {
      std::size_t hit = 0;
      while (next[hit] == sp.dist[hit]) ++hit;
      const std::size_t s = hit / V;
      // Walking V predecessors back from a vertex still improving lands on
      // the cycle itself.
      std::int64_t cur = static_cast<std::int64_t>(hit % V);
      for (std::uint32_t step = 0; step < V; ++step) {
        const auto p = next_pred[s * V + static_cast<std::size_t>(cur)];
        if (p == kNoPred) {
          cur = static_cast<std::int64_t>(hit % V);
          break;
        }
        cur = p;
      }
      throw NegativeCycleError(sources[s], static_cast<std::size_t>(cur));
    }
    sp.dist.swap(next);
    sp.pred.swap(next_pred);
    if (!changed) break;
  }
  return sp;
}

inline ShortestPaths bellman_ford(const EdgeListGraph& g, std::uint32_t source) {
  const std::uint32_t s[1] = {source};
  return bellman_ford(g, std::span<const std::uint32_t>(s));
}

}  // namespace wsro
