#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "wsro/bellman_ford.hpp"
#include "wsro/error.hpp"
#include "wsro/graph.hpp"
#include "wsro/grid.hpp"
#include "wsro/permutations.hpp"

namespace wsro {

// Shortest-path lengths between route stops.
struct DistanceMatrix {
  std::vector<Stop> stops;              // empty for graphs without a grid
  std::vector<std::uint32_t> vertices;  // graph vertex of each stop
  std::vector<Weight> d;                // row-major n x n

  std::size_t size() const noexcept { return vertices.size(); }
  Weight at(std::size_t a, std::size_t b) const { return d[a * size() + b]; }

  void require_connected() const {
    for (std::size_t a = 0; a < size(); ++a)
      for (std::size_t b = 0; b < size(); ++b)
        if (at(a, b) == kUnreachable)
          throw NotFoundError("no path between stop vertices " + std::to_string(vertices[a]) +
                              " and " + std::to_string(vertices[b]));
  }

  DistanceMatrix subset(std::span<const std::size_t> idx) const {
    DistanceMatrix m;
    m.vertices.reserve(idx.size());
    for (auto i : idx) {
      m.vertices.push_back(vertices.at(i));
      if (!stops.empty()) m.stops.push_back(stops.at(i));
    }
    m.d.resize(idx.size() * idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) m.d[a * idx.size() + b] = at(idx[a], idx[b]);
    return m;
  }
};

// One Bellman-Ford batch with every stop as a source.
inline DistanceMatrix pairwise_distances(const EdgeListGraph& g, std::vector<std::uint32_t> vertices) {
  DistanceMatrix m;
  m.vertices = std::move(vertices);
  const auto sp = bellman_ford(g, m.vertices);
  const auto n = m.size();
  m.d.resize(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) m.d[a * n + b] = sp.distance(a, m.vertices[b]);
  return m;
}

inline DistanceMatrix pairwise_distances(const GridDims& dims, const EdgeListGraph& g,
                                         std::span<const Stop> stops) {
  std::vector<std::uint32_t> vs;
  vs.reserve(stops.size());
  for (const auto& s : stops) {
    if (!contains(dims, s)) throw NotFoundError("stop " + to_string(s) + " outside the grid");
    vs.push_back(static_cast<std::uint32_t>(stop_vertex(dims, s)));
  }
  auto m = pairwise_distances(g, std::move(vs));
  m.stops.assign(stops.begin(), stops.end());
  return m;
}

enum class RouteMethod { Exact, HeldKarp, Clustered };

inline const char* to_string(RouteMethod m) {
  switch (m) {
    case RouteMethod::Exact: return "exact";
    case RouteMethod::HeldKarp: return "held_karp";
    case RouteMethod::Clustered: return "clustered";
  }
  return "?";
}

struct RoutePlan {
  std::vector<std::size_t> order;  // indices into the distance matrix
  Weight length = 0;
  RouteMethod method = RouteMethod::Exact;
};

template <class Seq>
Weight route_length(const DistanceMatrix& dm, const Seq& order) {
  Weight len = 0;
  for (std::size_t t = 1; t < order.size(); ++t)
    len += dm.at(static_cast<std::size_t>(order[t - 1]), static_cast<std::size_t>(order[t]));
  return len;
}

struct RouteOptions {
  unsigned exhaustive_limit = 11;  // 11!/2 ~ 2e7 routes
  std::uint64_t segment_capacity = kDefaultSegmentCapacity;
};

namespace detail {

struct RouteBest {
  Weight length = kUnreachable;
  std::vector<int> perm;

  // Shorter wins; equal lengths go to the lexicographically smaller order.
  bool offer(Weight len, const std::vector<int>& p) {
    if (len < length || (len == length && p < perm)) {
      length = len;
      perm = p;
      return true;
    }
    return false;
  }
};

inline bool is_symmetric(const DistanceMatrix& dm) {
  const auto n = dm.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (dm.d[a * n + b] != dm.d[b * n + a]) return false;
  return true;
}

inline void check_route_input(const DistanceMatrix& dm) {
  if (dm.size() == 0) throw ConfigError("route needs at least one stop");
  if (dm.d.size() != dm.size() * dm.size()) throw ConfigError("distance matrix is not square");
  dm.require_connected();
}

}  // namespace detail

// Best route over indices [first, first + count) of the open-route space.
// Split into chunks evaluated in parallel, reduced in chunk order. With an
// asymmetric matrix both directions of every route are scored.
inline detail::RouteBest evaluate_open_routes(const DistanceMatrix& dm, std::uint64_t first,
                                              std::uint64_t count) {
  const bool symmetric = detail::is_symmetric(dm);
  const auto n = static_cast<unsigned>(dm.size());
  detail::RouteBest best;
  if (count == 0) return best;
  const std::uint64_t chunk = std::max<std::uint64_t>(4096, count / 256 + 1);
  const auto chunks = static_cast<long long>((count + chunk - 1) / chunk);
  std::vector<detail::RouteBest> part(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(dynamic)
  for (long long c = 0; c < chunks; ++c) {
    const std::uint64_t lo = first + static_cast<std::uint64_t>(c) * chunk;
    const std::uint64_t len = std::min(chunk, first + count - lo);
    OpenRouteCursor cur(n, lo);
    auto& b = part[static_cast<std::size_t>(c)];
    std::vector<int> rev;
    for (std::uint64_t x = 0; x < len; ++x) {
      if (x > 0) cur.advance();
      const auto& p = cur.current();
      b.offer(route_length(dm, p), p);
      if (!symmetric) {
        rev.assign(p.rbegin(), p.rend());
        b.offer(route_length(dm, rev), rev);
      }
    }
  }
  for (const auto& b : part)
    if (!b.perm.empty()) best.offer(b.length, b.perm);
  return best;
}

// Minimal open route by exhaustive search of the n!/2 undirected routes,
// evaluated batch by batch per the segmentation plan.
inline RoutePlan exact_open_route(const DistanceMatrix& dm, const RouteOptions& opt = {}) {
  detail::check_route_input(dm);
  const auto n = static_cast<unsigned>(dm.size());
  if (n > opt.exhaustive_limit)
    throw LimitError(std::to_string(n) + " stops exceed the exhaustive limit of " +
                     std::to_string(opt.exhaustive_limit) + "; use clustered_route");
  const auto plan = plan_segmentation(open_route_count(n), opt.segment_capacity);
  detail::RouteBest best;
  for (const auto& seg : plan.ranges) {
    const auto b = evaluate_open_routes(dm, seg.start, seg.count);
    best.offer(b.length, b.perm);
  }
  RoutePlan r;
  r.method = RouteMethod::Exact;
  r.length = best.length;
  r.order.assign(best.perm.begin(), best.perm.end());
  return r;
}

inline constexpr unsigned kHeldKarpLimit = 20;

// Open-path Held-Karp: best[mask][last] over paths that start anywhere.
inline RoutePlan held_karp_open_route(const DistanceMatrix& dm) {
  detail::check_route_input(dm);
  const auto n = dm.size();
  if (n > kHeldKarpLimit)
    throw LimitError(std::to_string(n) + " stops exceed the Held-Karp limit of " +
                     std::to_string(kHeldKarpLimit));
  RoutePlan r;
  r.method = RouteMethod::HeldKarp;
  if (n == 1) {
    r.order = {0};
    return r;
  }
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<Weight> best((full + 1) * n, kUnreachable);
  std::vector<std::int8_t> parent((full + 1) * n, -1);
  for (std::size_t v = 0; v < n; ++v) best[(std::size_t{1} << v) * n + v] = 0;
  for (std::size_t mask = 1; mask <= full; ++mask)
    for (std::size_t last = 0; last < n; ++last) {
      const Weight cur = best[mask * n + last];
      if (cur == kUnreachable) continue;
      for (std::size_t nxt = 0; nxt < n; ++nxt) {
        if (mask & (std::size_t{1} << nxt)) continue;
        const auto m2 = mask | (std::size_t{1} << nxt);
        const Weight cand = cur + dm.at(last, nxt);
        if (cand < best[m2 * n + nxt]) {
          best[m2 * n + nxt] = cand;
          parent[m2 * n + nxt] = static_cast<std::int8_t>(last);
        }
      }
    }
  std::size_t last = 0;
  for (std::size_t v = 1; v < n; ++v)
    if (best[full * n + v] < best[full * n + last]) last = v;
  r.length = best[full * n + last];
  std::size_t mask = full;
  while (true) {
    r.order.push_back(last);
    const auto p = parent[mask * n + last];
    if (p < 0) break;
    mask &= ~(std::size_t{1} << last);
    last = static_cast<std::size_t>(p);
  }
  // The path was traced back from its end.
  std::reverse(r.order.begin(), r.order.end());
  if (r.order.front() > r.order.back() && detail::is_symmetric(dm)) std::reverse(r.order.begin(), r.order.end());
  return r;
}

// Exact open route inside each cluster, then the best of the m!·2^(m-1)
// ways to chain the cluster paths: cluster orders with the first cluster
// smaller than the last, times both orientations of every path. Chains are
// joined endpoint to endpoint at shortest-path cost. Asymmetric matrices
// try all m!·2^m chains.
inline RoutePlan clustered_route(const DistanceMatrix& dm, std::span<const int> labels,
                                 const RouteOptions& opt = {}) {
  detail::check_route_input(dm);
  if (labels.size() != dm.size()) throw ConfigError("one cluster label per stop required");
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t s = 0; s < labels.size(); ++s) groups[labels[s]].push_back(s);
  const auto m = groups.size();
  if (m > opt.exhaustive_limit)
    throw LimitError(std::to_string(m) + " clusters exceed the exhaustive limit");

  std::vector<std::vector<std::size_t>> paths;
  for (const auto& [label, members] : groups) {
    const auto sub = dm.subset(members);
    const auto plan = exact_open_route(sub, opt);
    std::vector<std::size_t> p;
    for (auto x : plan.order) p.push_back(members[x]);
    paths.push_back(std::move(p));
  }

  RoutePlan r;
  r.method = RouteMethod::Clustered;
  if (m == 1) {
    r.order = paths.front();
    r.length = route_length(dm, r.order);
    return r;
  }

  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  const bool symmetric = detail::is_symmetric(dm);
  Weight best_len = kUnreachable;
  std::vector<std::size_t> best_seq, seq;
  const std::uint32_t orientations = 1u << m;
  do {
    // A chain and its reverse have equal length on a symmetric matrix.
    if (symmetric && perm.front() > perm.back()) continue;
    for (std::uint32_t o = 0; o < orientations; ++o) {
      seq.clear();
      for (std::size_t t = 0; t < m; ++t) {
        const auto& p = paths[static_cast<std::size_t>(perm[t])];
        if ((o >> t) & 1u)
          seq.insert(seq.end(), p.rbegin(), p.rend());
        else
          seq.insert(seq.end(), p.begin(), p.end());
      }
      const Weight len = route_length(dm, seq);
      if (len < best_len || (len == best_len && seq < best_seq)) {
        best_len = len;
        best_seq = seq;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  r.order = std::move(best_seq);
  r.length = best_len;
  return r;
}

using BigCount = boost::multiprecision::cpp_int;

struct RouteCounts {
  BigCount reduced;  // route evaluations with cluster decomposition
  BigCount brute;    // undirected routes over all stops
};

namespace detail {

inline BigCount big_factorial(std::size_t n) {
  BigCount f = 1;
  for (std::size_t x = 2; x <= n; ++x) f *= x;
  return f;
}

// Undirected open routes over k stops; a single stop still has one route.
inline BigCount undirected_routes(std::size_t k) { return k <= 1 ? BigCount(1) : big_factorial(k) / 2; }

}  // namespace detail

// m!·2^(m-1) stitchings plus the per-cluster route counts, against n!/2.
inline RouteCounts route_count_reduction(std::size_t n, std::span<const std::size_t> parts) {
  if (parts.empty()) throw ConfigError("partition needs at least one part");
  std::size_t sum = 0;
  for (auto p : parts) {
    if (p == 0) throw ConfigError("partition parts must be >= 1");
    sum += p;
  }
  if (sum != n) throw ConfigError("partition sums to " + std::to_string(sum) + ", not " + std::to_string(n));
  RouteCounts c;
  const auto m = parts.size();
  c.reduced = detail::big_factorial(m) * (BigCount(1) << (m - 1));
  for (auto p : parts) c.reduced += detail::undirected_routes(p);
  c.brute = detail::undirected_routes(n);
  return c;
}

// position,vertex,i,j,cumulative_length; the last row carries the total.
inline void write_route_csv(std::ostream& os, const RoutePlan& plan, const DistanceMatrix& dm) {
  os << "position,vertex,i,j,cumulative_length\n";
  Weight acc = 0;
  for (std::size_t t = 0; t < plan.order.size(); ++t) {
    const auto s = plan.order[t];
    if (t > 0) acc += dm.at(plan.order[t - 1], s);
    os << t << ',' << dm.vertices[s] << ',';
    if (!dm.stops.empty())
      os << dm.stops[s].i << ',' << dm.stops[s].j;
    else
      os << ',';
    os << ',' << acc << '\n';
  }
}

}  // namespace wsro
