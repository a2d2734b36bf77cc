#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "wsro/clustering.hpp"
#include "wsro/error.hpp"
#include "wsro/grid.hpp"
#include "wsro/orders.hpp"
#include "wsro/warehouse_state.hpp"

namespace wsro {

// w(x, o): parcels to collect per node.
struct PickMap {
  std::map<Coord, Parcels> w;

  std::uint64_t total() const noexcept {
    std::uint64_t s = 0;
    for (const auto& [c, q] : w) s += q;
    return s;
  }
  Parcels at(const Coord& c) const {
    auto it = w.find(c);
    return it == w.end() ? 0 : it->second;
  }
  std::size_t support() const noexcept { return w.size(); }
};

// Every ordered article sits at exactly one node, so w is the order's
// quantity vector moved onto those nodes.
inline PickMap compute_pick_map(const WarehouseState& state, const Order& order) {
  PickMap pm;
  for (const auto& line : order.totals()) pm.w[state.locate(line.article)] += line.quantity;
  return pm;
}

struct StockUpdate {
  std::vector<Coord> emptied;                        // nodes driven to zero
  std::vector<std::pair<Coord, Parcels>> shortfall;  // unmet parcels per node
  std::uint64_t removed = 0;
};

// M' = max(M - w, 0); A unchanged.
inline StockUpdate update_stock(WarehouseState& state, const PickMap& pick) {
  StockUpdate u;
  for (const auto& [c, q] : pick.w) {
    const Parcels m = state.balance_at(c);
    const Parcels taken = std::min(m, q);
    state.set_balance(c, m - taken);
    u.removed += taken;
    if (taken < q) u.shortfall.emplace_back(c, q - taken);
    if (m - taken == 0 && q > 0) u.emptied.push_back(c);
  }
  return u;
}

// True iff every ordered article is placed and m > w at its node.
inline bool check_stock(const WarehouseState& state, const Order& order) {
  for (const auto& line : order.totals()) {
    if (!state.is_placed(line.article)) return false;
    if (state.balance_at(state.locate_index(line.article)) <= line.quantity) return false;
  }
  return true;
}

enum class RestockKind {
  Relocated,  // moved to an empty node closer to its cluster center
  InPlace,    // already at least as close as any empty node; refilled where it is
  Blocked,    // no empty node left; refilled where it is
};

inline const char* to_string(RestockKind k) {
  switch (k) {
    case RestockKind::Relocated: return "relocated";
    case RestockKind::InPlace: return "in-place";
    case RestockKind::Blocked: return "blocked";
  }
  return "?";
}

// One article whose node failed the strict stock check.
struct RelocationEvent {
  ArticleId article = 0;
  RestockKind kind = RestockKind::Relocated;
  Coord from;
  Coord to;                  // equals `from` unless relocated
  int cluster = -1;
  Parcels residue = 0;       // collected at the old node, which is left empty
  Parcels shortfall = 0;     // collected after restocking
  Parcels added = 0;         // parcels brought in by the restock
  double distance_before = 0.0;  // stop-to-center distance
  double distance_after = 0.0;
};

namespace detail {

inline double stop_distance(const Coord& c, const Point2& center) {
  return distance({static_cast<double>(c.i), static_cast<double>(c.j)}, center);
}

// Restock amount for a refill that must also cover `shortfall`: whole
// capacity units, leaving a balance in [1, capacity].
inline Parcels restock_amount(Parcels capacity, Parcels shortfall) {
  return (shortfall / capacity + 1) * capacity;
}

// Handles articles whose node would be emptied by the pick (m <= w): picks
// the residue, restocks at the empty node nearest the article's cluster
// center when that stop is strictly closer than the current one, otherwise
// restocks in place, then picks the shortfall. The empty-node pool is the
// set of nodes empty at entry; each relocation consumes its target.
inline std::vector<RelocationEvent> restock_insufficient(
    WarehouseState& state, const std::vector<std::pair<ArticleId, Parcels>>& insufficient,
    const ClusterModel& clusters) {
  std::vector<RelocationEvent> events;
  if (insufficient.empty()) return events;
  std::vector<Coord> pool = find_empty_nodes(state);
  std::vector<char> used(pool.size(), 0);

  for (const auto& [article, need] : insufficient) {
    RelocationEvent ev;
    ev.article = article;
    ev.from = state.locate(article);
    ev.to = ev.from;
    const Parcels capacity = state.capacity(article);
    const Parcels m = state.balance_at(ev.from);
    ev.residue = std::min(m, need);
    ev.shortfall = need - ev.residue;
    ev.added = restock_amount(capacity, ev.shortfall);

    auto it = clusters.article_cluster.find(article);
    ev.cluster = it == clusters.article_cluster.end() ? -1 : it->second;
    const bool have_center =
        ev.cluster >= 0 && !clusters.stats[static_cast<std::size_t>(ev.cluster)].empty();
    const Point2 center =
        have_center ? clusters.stats[static_cast<std::size_t>(ev.cluster)].center() : Point2{};

    std::size_t best = pool.size();
    double best_d = 0.0;
    if (have_center) {
      for (std::size_t e = 0; e < pool.size(); ++e) {
        if (used[e]) continue;
        const double d = stop_distance(pool[e], center);
        if (best == pool.size() || d < best_d) {  // pool is lexicographic: first wins ties
          best = e;
          best_d = d;
        }
      }
      ev.distance_before = stop_distance(ev.from, center);
      ev.distance_after = ev.distance_before;
    }

    if (best == pool.size()) {
      ev.kind = RestockKind::Blocked;
      state.set_balance(ev.from, m - ev.residue + ev.added - ev.shortfall);
    } else if (ev.distance_before > best_d) {
      ev.kind = RestockKind::Relocated;
      ev.to = pool[best];
      used[best] = 1;
      ev.distance_after = best_d;
      state.move_article(article, ev.to, ev.added - ev.shortfall);
    } else {
      ev.kind = RestockKind::InPlace;
      state.set_balance(ev.from, m - ev.residue + ev.added - ev.shortfall);
    }
    events.push_back(ev);
  }
  return events;
}

// Ordered articles whose node fails m > w, in order of first appearance.
inline std::vector<std::pair<ArticleId, Parcels>> insufficient_articles(
    const WarehouseState& state, const Order& order) {
  std::map<ArticleId, Parcels> need;
  for (const auto& line : order.totals()) need[line.article] = line.quantity;
  std::vector<std::pair<ArticleId, Parcels>> out;
  std::set<ArticleId> seen;
  for (const auto& p : order.purchases())
    for (const auto& l : p.lines) {
      if (!seen.insert(l.article).second) continue;
      const Parcels q = need[l.article];
      if (q == 0) continue;
      if (state.balance_at(state.locate_index(l.article)) <= q) out.emplace_back(l.article, q);
    }
  return out;
}

}  // namespace detail

// Picks every article of `order` whose node fails the strict check and
// restocks it, relocating toward its cluster center where possible.
inline std::vector<RelocationEvent> check_stock_and_move(WarehouseState& state, const Order& order,
                                                         const ClusterModel& clusters) {
  if (check_stock(state, order)) return {};
  return detail::restock_insufficient(state, detail::insufficient_articles(state, order), clusters);
}

struct ProcessResult {
  PickMap pick;
  std::vector<RelocationEvent> events;
  std::uint64_t removed = 0;  // parcels taken out, equals the order size
  std::uint64_t added = 0;    // parcels brought in by restocks

  std::size_t count(RestockKind k) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [k](const auto& e) { return e.kind == k; }));
  }
};

// Per-node pick counters; telemetry only.
class PickCounters {
 public:
  explicit PickCounters(std::size_t nodes = 0) : counts_(nodes, 0) {}

  void record(const GridDims& dims, const ProcessResult& r) {
    std::set<Coord> restocked;
    for (const auto& e : r.events) {
      if (e.residue > 0) bump(dims, e.from);
      if (e.shortfall > 0) bump(dims, e.to);
      restocked.insert(e.from);
    }
    for (const auto& [c, q] : r.pick.w)
      if (!restocked.count(c)) bump(dims, c);
  }

  std::uint32_t at(std::size_t node) const { return counts_.at(node); }
  const std::vector<std::uint32_t>& counts() const noexcept { return counts_; }

 private:
  void bump(const GridDims& dims, const Coord& c) {
    const auto idx = node_index(dims, c);
    if (idx >= counts_.size()) counts_.resize(dims.node_count(), 0);
    ++counts_[idx];
  }

  std::vector<std::uint32_t> counts_;
};

// x' = f(x, o): fills the order, restocking any node the pick would empty.
inline ProcessResult process_order(WarehouseState& state, const Order& order,
                                   const ClusterModel& clusters) {
  ProcessResult r;
  r.pick = compute_pick_map(state, order);
  const auto insufficient = detail::insufficient_articles(state, order);

  PickMap sufficient = r.pick;
  for (const auto& [article, q] : insufficient) sufficient.w.erase(state.locate(article));

  r.events = detail::restock_insufficient(state, insufficient, clusters);
  const auto upd = update_stock(state, sufficient);
  r.removed = upd.removed;
  for (const auto& e : r.events) {
    r.removed += e.residue + e.shortfall;
    r.added += e.added;
  }
  return r;
}

}  // namespace wsro
