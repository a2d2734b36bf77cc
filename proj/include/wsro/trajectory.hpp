#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "wsro/clustering.hpp"
#include "wsro/csv.hpp"
#include "wsro/error.hpp"
#include "wsro/orders.hpp"
#include "wsro/snapshot.hpp"
#include "wsro/warehouse_state.hpp"
#include "wsro/wms.hpp"

namespace wsro {

// Iteration n of the loop: clusters of (x_{n-1}, o_n) and the effect of
// filling o_n.
struct TrajectoryRecord {
  std::size_t n = 0;
  std::uint64_t state_digest = 0;  // digest of x_{n-1}
  std::vector<ClusterStats> clusters;
  double silhouette = std::numeric_limits<double>::quiet_NaN();
  double area = std::numeric_limits<double>::quiet_NaN();
  std::size_t picking_nodes = 0;
  std::size_t stops = 0;
  std::size_t relocations = 0;
  std::size_t in_place = 0;
  std::size_t blocked = 0;
  std::uint64_t removed = 0;
  std::uint64_t added = 0;
  std::uint64_t stock_before = 0;
  std::uint64_t stock_after = 0;
  std::optional<std::int64_t> route_exact;
  std::optional<std::int64_t> route_clustered;
  std::vector<RelocationEvent> events;  // filled when RunOptions::keep_events
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  WarehouseState final_state;
  PickCounters pick_counts;
};

struct StepView {
  std::size_t n;
  const WarehouseState& before;  // x_{n-1}
  const Order& order;            // o_n
  const ClusterModel& clusters;
  TrajectoryRecord& record;
};

struct RunOptions {
  int k = 3;
  std::uint64_t kmeans_seed = 0;
  // Re-run k-means every iteration. When false the purchase-order grouping
  // of iteration 1 is kept and only the centers follow the state.
  bool recluster_each_step = true;
  bool keep_events = false;
  bool digest_states = true;
  // Called after clustering and before picking, e.g. to compute routes.
  std::function<void(const StepView&)> on_step;
};

namespace detail {

// Rebuilds the node partition of `grouping` against the current state.
inline ClusterModel regroup(const WarehouseState& state, const Order& order,
                            const ClusterModel& grouping) {
  ClusterModel m;
  m.k = grouping.k;
  m.assignment = grouping.assignment;
  if (m.assignment.size() != order.purchases().size())
    throw ConfigError("fixed grouping needs the same purchase-order count every iteration");
  std::vector<std::vector<Coord>> nodes(static_cast<std::size_t>(m.k));
  std::vector<Coord> all;
  for (std::size_t p = 0; p < order.purchases().size(); ++p) {
    const auto& lines = order.purchases()[p].lines;
    double sx = 0.0, sy = 0.0;
    for (const auto& l : lines) {
      const Coord c = state.locate(l.article);
      sx += c.i;
      sy += c.j;
      if (l.quantity == 0 || !m.article_cluster.emplace(l.article, m.assignment[p]).second) continue;
      nodes[static_cast<std::size_t>(m.assignment[p])].push_back(c);
      all.push_back(c);
    }
    const double n = lines.empty() ? 1.0 : static_cast<double>(lines.size());
    m.features.push_back({sx / n, sy / n});
  }
  for (auto& ns : nodes) {
    m.stats.push_back(cluster_stats(ns));
    m.clusters.push_back(PickSets::from_nodes(std::move(ns)));
  }
  m.all = PickSets::from_nodes(std::move(all));
  return m;
}

inline double safe_silhouette(const ClusterModel& m) {
  if (m.nonempty_count() < 2) return std::numeric_limits<double>::quiet_NaN();
  return silhouette_of_clustering(m);
}

}  // namespace detail

// x_n = f(x_{n-1}, o_n) for n = 1..iterations with o_n drawn from `stream`.
inline Trajectory run_main_loop(WarehouseState x0, OrderStream& stream, std::size_t iterations,
                                const RunOptions& opt = {}) {
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  Trajectory t;
  t.pick_counts = PickCounters(x0.node_count());
  WarehouseState& x = x0;
  ClusterModel first;
  t.records.reserve(iterations);

  for (std::size_t n = 1; n <= iterations; ++n) {
    const Order o = stream.next();
    TrajectoryRecord rec;
    rec.n = n;
    if (opt.digest_states) rec.state_digest = state_digest(x);

    ClusterModel model = (opt.recluster_each_step || n == 1)
                             ? cluster_orders(x, o, opt.k, opt.kmeans_seed)
                             : detail::regroup(x, o, first);
    if (n == 1) first = model;

    rec.clusters = model.stats;
    rec.silhouette = detail::safe_silhouette(model);
    rec.area = centers_triangle_area(model);
    rec.picking_nodes = model.all.s_pick.size();
    rec.stops = model.all.s_stop.size();
    if (opt.on_step) opt.on_step(StepView{n, x, o, model, rec});

    rec.stock_before = x.total_stock();
    ProcessResult r = process_order(x, o, model);
    rec.stock_after = x.total_stock();
    rec.removed = r.removed;
    rec.added = r.added;
    rec.relocations = r.count(RestockKind::Relocated);
    rec.in_place = r.count(RestockKind::InPlace);
    rec.blocked = r.count(RestockKind::Blocked);
    t.pick_counts.record(x.dims(), r);
    if (opt.keep_events) rec.events = std::move(r.events);
    t.records.push_back(std::move(rec));
  }
  t.final_state = std::move(x);
  return t;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  os << "n,silhouette,area,relocations,in_place,blocked,stops,picking_nodes,removed,added,"
        "route_len_exact,route_len_approx\n";
  for (const auto& r : t.records) {
    os << r.n << ',' << fmt_real(r.silhouette) << ',' << fmt_real(r.area) << ',' << r.relocations
       << ',' << r.in_place << ',' << r.blocked << ',' << r.stops << ',' << r.picking_nodes << ','
       << r.removed << ',' << r.added << ',';
    if (r.route_exact) os << *r.route_exact;
    os << ',';
    if (r.route_clustered) os << *r.route_clustered;
    os << '\n';
  }
}

}  // namespace wsro
