#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wsro/experiment.hpp"

namespace wsro {

struct CheckOutcome {
  std::string name;
  std::uint64_t checked = 0;
  std::vector<std::string> failures;  // first few only

  bool passed() const noexcept { return failures.empty(); }
  void fail(std::string msg) {
    if (failures.size() < 5) failures.push_back(std::move(msg));
    else if (failures.size() == 5) failures.push_back("...");
  }
};

struct ValidationReport {
  std::vector<CheckOutcome> checks;

  bool passed() const noexcept {
    for (const auto& c : checks)
      if (!c.passed()) return false;
    return true;
  }
  CheckOutcome& get(const std::string& name) {
    for (auto& c : checks)
      if (c.name == name) return c;
    checks.push_back({name, 0, {}});
    return checks.back();
  }
};

// Runs every configured (experiment, run) pair and checks the state,
// order, clustering and bookkeeping invariants at every iteration.
// Relocation events are always recorded here so the guard can be checked.
inline ValidationReport validate_invariants(ExperimentConfig c) {
  c.keep_events = true;
  c.validate();
  ValidationReport rep;
  for (const char* n : {"state-invariants", "order-structure", "cluster-partition", "score-ranges",
                        "covariance-psd", "stock-balance", "order-filled", "relocation-guard",
                        "snapshot-roundtrip", "determinism"})
    rep.get(n);

  for (int e : c.experiments)
    for (std::size_t run = 0; run < c.run_count(); ++run) {
      const std::string tag = "exp " + std::to_string(e) + " run " + std::to_string(run);
      std::vector<std::uint64_t> order_quantity(c.iterations + 1, 0);
      auto on_step = [&](const StepView& v) {
        const std::string at = tag + " n=" + std::to_string(v.n);
        auto& st = rep.get("state-invariants");
        ++st.checked;
        for (const auto& msg : v.before.check_invariants()) st.fail(at + ": " + msg);

        auto& os = rep.get("order-structure");
        ++os.checked;
        std::set<ArticleId> seen;
        const auto& pos = v.order.purchases();
        const auto shape = c.order_shape();
        if (pos.size() != shape.purchase_count) os.fail(at + ": wrong purchase-order count");
        for (const auto& po : pos) {
          if (po.lines.size() != shape.lines_per_purchase) os.fail(at + ": wrong line count");
          std::set<ArticleId> in_po;
          for (const auto& l : po.lines) {
            order_quantity[v.n] += static_cast<std::uint64_t>(l.quantity);
            if (l.article < 1 || l.article > c.article_count) os.fail(at + ": article out of range");
            if (l.quantity < 1 || l.quantity > c.max_quantity) os.fail(at + ": quantity out of range");
            if (!in_po.insert(l.article).second) os.fail(at + ": article repeated within a purchase order");
            seen.insert(l.article);
          }
        }
        if (e == 1 && seen.size() != shape.article_types()) os.fail(at + ": base order lost disjointness");

        auto& cp = rep.get("cluster-partition");
        ++cp.checked;
        std::size_t total = 0;
        std::set<Coord> members;
        for (const auto& cl : v.clusters.clusters) {
          total += cl.s_pick.size();
          members.insert(cl.s_pick.begin(), cl.s_pick.end());
        }
        if (total != members.size()) cp.fail(at + ": clusters overlap");
        if (members != std::set<Coord>(v.clusters.all.s_pick.begin(), v.clusters.all.s_pick.end()))
          cp.fail(at + ": clusters do not cover the picking nodes");
        for (const auto& p : v.clusters.all.s_pick)
          if (v.before.article_at(p) == 0) cp.fail(at + ": picking node is empty");

        auto& sr = rep.get("score-ranges");
        ++sr.checked;
        const double s = v.record.silhouette, a = v.record.area;
        if (!std::isnan(s) && (s < -1.0 - 1e-12 || s > 1.0 + 1e-12)) sr.fail(at + ": silhouette out of [-1, 1]");
        if (!std::isnan(a) && a < 0.0) sr.fail(at + ": negative area");

        auto& cv = rep.get("covariance-psd");
        ++cv.checked;
        for (const auto& cs : v.clusters.stats) {
          if (cs.empty()) continue;
          const auto ev = cs.eigenvalues();
          const double tol = 1e-9 * std::max(1.0, cs.sxx + cs.syy);
          if (cs.sxx < -tol || cs.syy < -tol || ev[0] < -tol || ev[1] < -tol)
            cv.fail(at + ": covariance not positive semidefinite");
        }
      };

      RunResult r = simulate_run(c, e, run, on_step);

      auto& sb = rep.get("stock-balance");
      auto& of = rep.get("order-filled");
      for (const auto& rec : r.trajectory.records) {
        ++sb.checked;
        ++of.checked;
        if (rec.stock_after + rec.removed != rec.stock_before + rec.added)
          sb.fail(tag + " n=" + std::to_string(rec.n) + ": stock not conserved");
        if (rec.removed != order_quantity[rec.n])
          of.fail(tag + " n=" + std::to_string(rec.n) + ": picked quantity differs from the order");
      }
      auto& rg = rep.get("relocation-guard");
      for (const auto& rec : r.trajectory.records)
        for (const auto& ev : rec.events) {
          ++rg.checked;
          if (ev.kind == RestockKind::Relocated && !(ev.distance_after < ev.distance_before))
            rg.fail(tag + " n=" + std::to_string(rec.n) + ": relocation moved article " +
                    std::to_string(ev.article) + " away from its center");
          if (ev.kind != RestockKind::Relocated && ev.distance_after != ev.distance_before)
            rg.fail(tag + " n=" + std::to_string(rec.n) + ": unmoved article changed distance");
        }

      const auto final_msgs = r.trajectory.final_state.check_invariants();
      auto& st = rep.get("state-invariants");
      ++st.checked;
      for (const auto& msg : final_msgs) st.fail(tag + " final: " + msg);

      auto& rt = rep.get("snapshot-roundtrip");
      ++rt.checked;
      try {
        if (!(restore(snapshot(r.trajectory.final_state)) == r.trajectory.final_state))
          rt.fail(tag + ": restored state differs");
      } catch (const std::exception& ex) {
        rt.fail(tag + ": " + ex.what());
      }

      if (run == 0) {
        auto& dt = rep.get("determinism");
        ++dt.checked;
        const auto again = simulate_run(c, e, run);
        if (state_digest(again.trajectory.final_state) != state_digest(r.trajectory.final_state))
          dt.fail(tag + ": rerun reached a different final state");
        for (std::size_t t = 0; t < r.trajectory.records.size(); ++t)
          if (again.trajectory.records[t].state_digest != r.trajectory.records[t].state_digest) {
            dt.fail(tag + ": rerun diverged at n=" + std::to_string(t + 1));
            break;
          }
      }
    }
  return rep;
}

}  // namespace wsro
