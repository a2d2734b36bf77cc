#pragma once

// Independent reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "wsro/graph.hpp"
#include "wsro/kmeans.hpp"
#include "wsro/rng.hpp"

namespace oracle {

using wsro::Weight;
inline constexpr Weight kInf = std::numeric_limits<Weight>::max();

// Binary-heap Dijkstra on nonnegative weights.
inline std::vector<Weight> dijkstra(const wsro::EdgeListGraph& g, std::uint32_t s) {
  std::vector<std::vector<std::pair<std::uint32_t, Weight>>> adj(g.vertex_count);
  for (std::size_t e = 0; e < g.edge_count(); ++e) adj[g.u[e]].push_back({g.v[e], g.w[e]});
  std::vector<Weight> d(g.vertex_count, kInf);
  using Item = std::pair<Weight, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  d[s] = 0;
  pq.push({0, s});
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du != d[u]) continue;
    for (auto [v, w] : adj[u])
      if (du + w < d[v]) {
        d[v] = du + w;
        pq.push({d[v], v});
      }
  }
  return d;
}

// Sparse random digraph with weights in [0, max_w].
inline wsro::EdgeListGraph random_graph(wsro::Rng& rng, std::uint32_t V, std::size_t E, Weight max_w) {
  wsro::EdgeListGraph g;
  g.vertex_count = V;
  for (std::size_t e = 0; e < E; ++e)
    g.add_edge(static_cast<std::uint32_t>(wsro::uniform_below(rng, V)),
               static_cast<std::uint32_t>(wsro::uniform_below(rng, V)),
               wsro::uniform_int(rng, 0, max_w));
  return g;
}

// Minimum open-path length over all n! visiting orders.
inline Weight brute_open_route(const std::vector<Weight>& d, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  Weight best = kInf;
  do {
    Weight len = 0;
    for (std::size_t t = 1; t < n; ++t) len += d[p[t - 1] * n + p[t]];
    best = std::min(best, len);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

// O(n^2) silhouette straight from the definition, singletons scoring 0.
inline double silhouette(const std::vector<wsro::Point2>& pts, const std::vector<int>& lab) {
  const std::size_t n = pts.size();
  std::set<int> labels(lab.begin(), lab.end());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double a_sum = 0.0;
    std::size_t a_n = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && lab[j] == lab[i]) {
        a_sum += std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
        ++a_n;
      }
    if (a_n == 0) continue;
    const double a = a_sum / static_cast<double>(a_n);
    double b = std::numeric_limits<double>::infinity();
    for (int c : labels) {
      if (c == lab[i]) continue;
      double s = 0.0;
      std::size_t m = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (lab[j] == c) {
          s += std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
          ++m;
        }
      b = std::min(b, s / static_cast<double>(m));
    }
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

// Two-sided permutation p over all (|A|+|B|)! orderings of the pooled values.
inline double permutation_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto mean = [](auto first, auto last) {
    return std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
  };
  const double obs = std::abs(mean(a.begin(), a.end()) - mean(b.begin(), b.end()));
  std::vector<std::size_t> idx(pooled.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::uint64_t hits = 0, total = 0;
  std::vector<double> perm(pooled.size());
  do {
    for (std::size_t t = 0; t < idx.size(); ++t) perm[t] = pooled[idx[t]];
    const auto mid = perm.begin() + static_cast<std::ptrdiff_t>(a.size());
    const double stat = std::abs(mean(perm.begin(), mid) - mean(mid, perm.end()));
    if (stat >= obs - 1e-12 * std::max(1.0, obs)) ++hits;
    ++total;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

// Direct pair count for Cliff's delta.
inline double cliffs_delta(const std::vector<double>& a, const std::vector<double>& b) {
  long long net = 0;
  for (double x : a)
    for (double y : b) net += (x > y) - (x < y);
  return static_cast<double>(net) / static_cast<double>(a.size() * b.size());
}

// Open routes over `k` stops counted by listing one orientation of each.
inline std::uint64_t enumerated_undirected_routes(std::size_t k) {
  std::vector<int> p(k);
  std::iota(p.begin(), p.end(), 0);
  std::set<std::vector<int>> seen;
  do {
    std::vector<int> r(p.rbegin(), p.rend());
    seen.insert(std::min(p, r));
  } while (std::next_permutation(p.begin(), p.end()));
  return seen.size();
}

// Cluster-level routes: orders of m clusters with an entry direction per
// cluster, a route and its reverse counted once.
inline std::uint64_t enumerated_cluster_sequences(std::size_t m) {
  std::vector<int> p(m);
  std::iota(p.begin(), p.end(), 0);
  std::set<std::vector<int>> seen;
  do {
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      // Encode cluster c entered forward as 2c and backward as 2c + 1.
      std::vector<int> seq, rev;
      for (std::size_t t = 0; t < m; ++t) seq.push_back(2 * p[t] + static_cast<int>((mask >> t) & 1u));
      for (auto it = seq.rbegin(); it != seq.rend(); ++it) rev.push_back(*it ^ 1);
      seen.insert(std::min(seq, rev));
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return seen.size();
}

}  // namespace oracle
