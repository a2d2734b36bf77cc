#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <vector>

#include "wsro/csv.hpp"
#include "wsro/error.hpp"
#include "wsro/grid.hpp"
#include "wsro/kmeans.hpp"
#include "wsro/orders.hpp"
#include "wsro/silhouette.hpp"
#include "wsro/warehouse_state.hpp"

namespace wsro {

// Picking nodes of (part of) an order and their projection onto stops.
struct PickSets {
  std::vector<Coord> s_pick;             // lexicographic
  std::vector<Stop> s_stop;              // lexicographic
  std::map<Stop, int> stop_frequency;    // levels picked per stop

  static PickSets from_nodes(std::vector<Coord> nodes) {
    PickSets ps;
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    ps.s_pick = std::move(nodes);
    for (const auto& c : ps.s_pick) ++ps.stop_frequency[stop_of(c)];
    for (const auto& [s, f] : ps.stop_frequency) ps.s_stop.push_back(s);
    return ps;
  }

  std::size_t stop_count() const noexcept { return s_stop.size(); }
};

// Frequency-weighted center and population covariance of a cluster's
// picking nodes, taken over their (i, j) stop coordinates.
struct ClusterStats {
  std::size_t size = 0;
  double center_x = std::numeric_limits<double>::quiet_NaN();
  double center_y = std::numeric_limits<double>::quiet_NaN();
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;

  bool empty() const noexcept { return size == 0; }
  Point2 center() const noexcept { return {center_x, center_y}; }

  std::array<double, 2> eigenvalues() const noexcept {
    const double mean = 0.5 * (sxx + syy);
    const double half = 0.5 * (sxx - syy);
    const double r = std::sqrt(half * half + sxy * sxy);
    return {mean - r, mean + r};
  }
};

inline ClusterStats cluster_stats(std::span<const Coord> nodes) {
  ClusterStats st;
  st.size = nodes.size();
  if (nodes.empty()) return st;
  double sx = 0.0, sy = 0.0;
  for (const auto& c : nodes) {
    sx += c.i;
    sy += c.j;
  }
  const double n = static_cast<double>(nodes.size());
  st.center_x = sx / n;
  st.center_y = sy / n;
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (const auto& c : nodes) {
    const double dx = c.i - st.center_x;
    const double dy = c.j - st.center_y;
    xx += dx * dx;
    yy += dy * dy;
    xy += dx * dy;
  }
  st.sxx = xx / n;
  st.syy = yy / n;
  st.sxy = xy / n;
  return st;
}

// Purchase orders grouped into K clusters, with the induced partition of
// the picking nodes. Cluster ids are 0-based.
struct ClusterModel {
  int k = 0;
  std::vector<Point2> features;         // per purchase order
  std::vector<int> assignment;          // per purchase order
  std::vector<PickSets> clusters;       // S_pick(l), disjoint
  std::vector<ClusterStats> stats;      // per cluster
  std::map<ArticleId, int> article_cluster;
  PickSets all;                         // S_pick

  // Cluster holding a picking node; -1 when the node is not picked.
  int cluster_of(const Coord& c) const {
    for (std::size_t l = 0; l < clusters.size(); ++l)
      if (std::binary_search(clusters[l].s_pick.begin(), clusters[l].s_pick.end(), c))
        return static_cast<int>(l);
    return -1;
  }

  std::size_t nonempty_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : stats) n += s.empty() ? 0 : 1;
    return n;
  }
};

// Groups the purchase orders of `order` by k-means on the mean stop
// position of their articles in `state`. A node ordered by several purchase
// orders belongs to the cluster of the first one.
inline ClusterModel cluster_orders(const WarehouseState& state, const Order& order, int k,
                                   std::uint64_t seed) {
  ClusterModel m;
  m.k = k;
  const auto& purchases = order.purchases();
  m.features.reserve(purchases.size());
  for (std::size_t p = 0; p < purchases.size(); ++p) {
    const auto& lines = purchases[p].lines;
    if (lines.empty()) throw ConfigError("purchase order " + std::to_string(p) + " has no lines");
    double sx = 0.0, sy = 0.0;
    for (const auto& l : lines) {
      const Coord c = state.locate(l.article);
      sx += c.i;
      sy += c.j;
    }
    const double n = static_cast<double>(lines.size());
    m.features.push_back({sx / n, sy / n});
  }
  m.assignment = kmeans(m.features, k, seed).assignment;

  std::vector<std::vector<Coord>> nodes(static_cast<std::size_t>(k));
  std::vector<Coord> all_nodes;
  for (std::size_t p = 0; p < purchases.size(); ++p) {
    const int l = m.assignment[p];
    for (const auto& line : purchases[p].lines) {
      if (line.quantity == 0) continue;
      if (!m.article_cluster.emplace(line.article, l).second) continue;
      const Coord c = state.locate(line.article);
      nodes[static_cast<std::size_t>(l)].push_back(c);
      all_nodes.push_back(c);
    }
  }
  m.clusters.reserve(nodes.size());
  for (auto& ns : nodes) {
    m.stats.push_back(cluster_stats(ns));
    m.clusters.push_back(PickSets::from_nodes(std::move(ns)));
  }
  m.all = PickSets::from_nodes(std::move(all_nodes));
  return m;
}

// Absolute shoelace area.
inline double triangle_area(const std::array<Point2, 3>& c) noexcept {
  return 0.5 * std::abs((c[1].x - c[0].x) * (c[2].y - c[0].y) -
                        (c[2].x - c[0].x) * (c[1].y - c[0].y));
}

// Triangle area of the cluster centers; NaN unless the model has exactly
// three non-empty clusters.
inline double centers_triangle_area(const ClusterModel& m) noexcept {
  if (m.stats.size() != 3 || m.nonempty_count() != 3) return std::numeric_limits<double>::quiet_NaN();
  return triangle_area({m.stats[0].center(), m.stats[1].center(), m.stats[2].center()});
}

// Silhouette inputs: one point per picking node at its stop (so each stop is
// repeated by its picking frequency), labeled by cluster.
inline void silhouette_points(const ClusterModel& m, std::vector<Point2>& points,
                              std::vector<int>& labels) {
  points.clear();
  labels.clear();
  for (std::size_t l = 0; l < m.clusters.size(); ++l)
    for (const auto& [s, f] : m.clusters[l].stop_frequency)
      for (int r = 0; r < f; ++r) {
        points.push_back({static_cast<double>(s.i), static_cast<double>(s.j)});
        labels.push_back(static_cast<int>(l));
      }
}

inline double silhouette_of_clustering(const ClusterModel& m) {
  std::vector<Point2> points;
  std::vector<int> labels;
  silhouette_points(m, points, labels);
  return silhouette(points, labels);
}

// CSV with one row per (stop, cluster): i,j,frequency,cluster
inline void write_cluster_stops_csv(std::ostream& os, const ClusterModel& m) {
  os << "i,j,frequency,cluster\n";
  for (std::size_t l = 0; l < m.clusters.size(); ++l)
    for (const auto& [s, f] : m.clusters[l].stop_frequency)
      os << s.i << ',' << s.j << ',' << f << ',' << l << '\n';
}

// CSV with one row per cluster: cluster,size,center_x,center_y,sxx,syy,sxy
inline void write_cluster_centers_csv(std::ostream& os, const ClusterModel& m) {
  os << "cluster,size,center_x,center_y,sxx,syy,sxy\n";
  for (std::size_t l = 0; l < m.stats.size(); ++l) {
    const auto& s = m.stats[l];
    os << l << ',' << s.size << ',' << fmt_real(s.center_x) << ',' << fmt_real(s.center_y) << ','
       << fmt_real(s.sxx) << ',' << fmt_real(s.syy) << ',' << fmt_real(s.sxy) << '\n';
  }
}

}  // namespace wsro
