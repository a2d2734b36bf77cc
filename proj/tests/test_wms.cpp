#include <gtest/gtest.h>

#include <sstream>

#include "wsro/trajectory.hpp"
#include "wsro/wms.hpp"

using namespace wsro;

namespace {

WarehouseState line_state(int nx, const std::vector<std::pair<ArticleId, Parcels>>& slots, ArticleId n,
                          Parcels cap = 10) {
  WarehouseState x(GridDims{nx, 1, 1}, std::vector<Parcels>(n + 1, cap));
  for (std::size_t t = 0; t < slots.size(); ++t)
    if (slots[t].first != kEmpty) x.place(slots[t].first, {static_cast<int>(t) + 1, 1, 1}, slots[t].second);
  return x;
}

Order single_po(std::vector<OrderLine> lines) { return Order({PurchaseOrder{std::move(lines)}}); }

}  // namespace

TEST(RestockAmount, WholeUnitsLeavingPositiveBalance) {
  for (Parcels cap = 1; cap <= 12; ++cap)
    for (Parcels s = 0; s <= 100; ++s) {
      const auto a = detail::restock_amount(cap, s);
      EXPECT_EQ(a % cap, 0u);
      EXPECT_GE(a - s, 1u);
      EXPECT_LE(a - s, cap);
    }
}

TEST(PickMap, SumsQuantitiesPerNode) {
  auto x = line_state(3, {{1, 10}, {2, 10}, {0, 0}}, 2);
  const Order o({PurchaseOrder{{{1, 2}, {2, 3}}}, PurchaseOrder{{{1, 4}}}});
  const auto pm = compute_pick_map(x, o);
  EXPECT_EQ(pm.at({1, 1, 1}), 6u);
  EXPECT_EQ(pm.at({2, 1, 1}), 3u);
  EXPECT_EQ(pm.total(), 9u);
  EXPECT_TRUE(check_stock(x, o));
  const auto u = update_stock(x, pm);
  EXPECT_EQ(u.removed, 9u);
  EXPECT_EQ(x.balance_at(Coord{1, 1, 1}), 4u);
  EXPECT_FALSE(check_stock(x, single_po({{1, 4}})));  // m > w is strict
  EXPECT_TRUE(check_stock(x, single_po({{1, 3}})));
}

TEST(ProcessOrder, InPlaceWhenNoEmptyNodeIsCloser) {
  auto x = line_state(4, {{1, 2}, {2, 5}, {0, 0}, {0, 0}}, 2);
  const auto o = single_po({{1, 3}, {2, 1}});
  const auto m = cluster_orders(x, o, 1, 0);
  const auto r = process_order(x, o, m);
  ASSERT_EQ(r.events.size(), 1u);
  const auto& e = r.events[0];
  EXPECT_EQ(e.kind, RestockKind::InPlace);
  EXPECT_EQ(e.residue, 2u);
  EXPECT_EQ(e.shortfall, 1u);
  EXPECT_EQ(e.added, 10u);
  EXPECT_DOUBLE_EQ(e.distance_before, 0.5);
  EXPECT_EQ(x.balance_at(Coord{1, 1, 1}), 9u);
  EXPECT_EQ(x.balance_at(Coord{2, 1, 1}), 4u);
  EXPECT_EQ(r.removed, 4u);
  EXPECT_EQ(r.added, 10u);
}

TEST(ProcessOrder, RelocatesTowardCenter) {
  auto x = line_state(5, {{2, 10}, {3, 10}, {0, 0}, {0, 0}, {1, 1}}, 3);
  const auto o = single_po({{1, 1}, {2, 1}, {3, 1}});
  const auto m = cluster_orders(x, o, 1, 0);
  const std::uint64_t before = x.total_stock();
  const auto r = process_order(x, o, m);
  ASSERT_EQ(r.count(RestockKind::Relocated), 1u);
  const auto& e = r.events[0];
  EXPECT_EQ(e.from, (Coord{5, 1, 1}));
  EXPECT_EQ(e.to, (Coord{3, 1, 1}));
  EXPECT_LT(e.distance_after, e.distance_before);
  EXPECT_EQ(x.locate(1), (Coord{3, 1, 1}));
  EXPECT_EQ(x.balance_at(Coord{3, 1, 1}), 10u);
  EXPECT_EQ(x.article_at(Coord{5, 1, 1}), kEmpty);
  EXPECT_EQ(x.total_stock() + r.removed, before + r.added);
  EXPECT_TRUE(x.check_invariants().empty());
}

TEST(ProcessOrder, EachRelocationConsumesItsTarget) {
  // Two short articles at the far end, one article anchoring the center.
  auto x = line_state(6, {{3, 10}, {0, 0}, {0, 0}, {0, 0}, {1, 1}, {2, 1}}, 3);
  const auto o = single_po({{1, 1}, {2, 1}, {3, 1}});
  const auto m = cluster_orders(x, o, 1, 0);
  const auto r = process_order(x, o, m);
  ASSERT_EQ(r.count(RestockKind::Relocated), 2u);
  EXPECT_NE(r.events[0].to, r.events[1].to);
  EXPECT_TRUE(x.check_invariants().empty());
}

TEST(ProcessOrder, BlockedWithoutEmptyNodes) {
  auto x = line_state(2, {{1, 1}, {2, 10}}, 2);
  const auto o = single_po({{1, 1}, {2, 2}});
  const auto m = cluster_orders(x, o, 1, 0);
  const auto r = process_order(x, o, m);
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_EQ(r.events[0].kind, RestockKind::Blocked);
  EXPECT_EQ(x.balance_at(Coord{1, 1, 1}), 10u);
  EXPECT_EQ(x.balance_at(Coord{2, 1, 1}), 8u);
}

TEST(ProcessOrder, LargeShortfallUsesSeveralCapacityUnits) {
  auto x = line_state(3, {{1, 3}, {0, 0}, {0, 0}}, 1);
  const auto o = single_po({{1, 25}});
  const auto m = cluster_orders(x, o, 1, 0);
  const auto r = process_order(x, o, m);
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_EQ(r.events[0].shortfall, 22u);
  EXPECT_EQ(r.events[0].added, 30u);
  EXPECT_EQ(x.balance_at(x.locate(1)), 8u);
  EXPECT_EQ(r.removed, 25u);
}

TEST(MainLoop, ConservesParcelsAndKeepsInvariants) {
  const auto x0 = init_random_state(StateConfig::small(31));
  const auto base = generate_base_order(890, 32);
  for (auto model : {Perturbation::None, Perturbation::FixedSlot, Perturbation::RandomSlot}) {
    OrderStream s(base, model, 33, 890);
    RunOptions opt;
    opt.kmeans_seed = 34;
    opt.keep_events = true;
    std::uint64_t order_parcels = 0;
    opt.on_step = [&](const StepView& v) { order_parcels += v.order.parcel_count(); };
    const auto t = run_main_loop(x0, s, 60, opt);
    std::uint64_t removed = 0, added = 0;
    for (const auto& r : t.records) {
      EXPECT_EQ(r.stock_after + r.removed, r.stock_before + r.added);
      removed += r.removed;
      added += r.added;
      for (const auto& e : r.events)
        if (e.kind == RestockKind::Relocated) {
          EXPECT_LT(e.distance_after, e.distance_before);
        }
    }
    EXPECT_EQ(removed, order_parcels);
    EXPECT_EQ(t.final_state.total_stock() + removed, x0.total_stock() + added);
    EXPECT_TRUE(t.final_state.check_invariants().empty());
  }
}

TEST(MainLoop, RecurringOrderTightensClusters) {
  const auto x0 = init_random_state(StateConfig::small(41));
  OrderStream s(generate_base_order(890, 42), Perturbation::None, 43, 890);
  RunOptions opt;
  opt.kmeans_seed = 44;
  const auto t = run_main_loop(x0, s, 80, opt);
  EXPECT_GT(t.records.back().silhouette, t.records.front().silhouette + 0.2);
  EXPECT_LT(t.records.back().stops, t.records.front().stops);
}

TEST(MainLoop, DeterministicGivenSeeds) {
  const auto x0 = init_random_state(StateConfig::small(51));
  const auto base = generate_base_order(890, 52);
  OrderStream a(base, Perturbation::RandomSlot, 53, 890), b(base, Perturbation::RandomSlot, 53, 890);
  RunOptions opt;
  opt.kmeans_seed = 54;
  const auto ta = run_main_loop(x0, a, 30, opt);
  const auto tb = run_main_loop(x0, b, 30, opt);
  for (std::size_t n = 0; n < 30; ++n) {
    EXPECT_EQ(ta.records[n].state_digest, tb.records[n].state_digest);
    EXPECT_EQ(ta.records[n].silhouette, tb.records[n].silhouette);
  }
  EXPECT_TRUE(ta.final_state == tb.final_state);
}

TEST(MainLoop, FixedGroupingKeepsAssignment) {
  const auto x0 = init_random_state(StateConfig::small(61));
  OrderStream s(generate_base_order(890, 62), Perturbation::None, 63, 890);
  RunOptions opt;
  opt.recluster_each_step = false;
  std::vector<std::vector<int>> seen;
  opt.on_step = [&](const StepView& v) { seen.push_back(v.clusters.assignment); };
  run_main_loop(x0, s, 10, opt);
  for (const auto& a : seen) EXPECT_EQ(a, seen.front());
}

TEST(TrajectoryCsv, HeaderAndArity) {
  const auto x0 = init_random_state(StateConfig::small(71));
  OrderStream s(generate_base_order(890, 72), Perturbation::None, 73, 890);
  const auto t = run_main_loop(x0, s, 5);
  std::ostringstream os;
  write_trajectory_csv(os, t);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line,
            "n,silhouette,area,relocations,in_place,blocked,stops,picking_nodes,removed,added,route_len_exact,"
            "route_len_approx");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 11);
  }
  EXPECT_EQ(rows, 5);
  EXPECT_THROW(run_main_loop(x0, s, 0), ConfigError);
}
