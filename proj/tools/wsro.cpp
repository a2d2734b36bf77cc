#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wsro/wsro.hpp"

namespace {

// Flags mirror ExperimentConfig; only flags given on the command line
// override the config file.
struct Flags {
  std::string config;
  std::optional<std::string> scale;
  std::optional<std::string> experiment;
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed_state;
  std::optional<std::uint64_t> seed_orders;
  std::optional<std::uint64_t> seed_kmeans;
  std::optional<std::uint64_t> seed_stats;
  std::optional<int> k;
  std::optional<std::string> out;
  bool route_study = false;
  std::optional<unsigned> exhaustive_limit;
  std::optional<std::uint64_t> segment_capacity;
  std::optional<std::size_t> route_order_size;
  std::optional<std::size_t> route_every;
  std::optional<std::uint64_t> resamples;
  bool keep_events = false;
};

void add_config_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  app->add_option("--scale", f.scale, "warehouse size")->check(CLI::IsMember({"small", "large"}));
  app->add_option("--experiment", f.experiment, "order perturbation model 1, 2 or 3 (comma list allowed)");
  app->add_option("--iterations", f.iterations, "main-loop iterations per run");
  app->add_option("--runs", f.runs, "independent runs (default 10, 5 at large scale)");
  app->add_option("--seed-state", f.seed_state, "seed for the initial slotting");
  app->add_option("--seed-orders", f.seed_orders, "seed for base orders and perturbations");
  app->add_option("--seed-kmeans", f.seed_kmeans, "seed for k-means initialisation");
  app->add_option("--seed-stats", f.seed_stats, "seed for resampling tests");
  app->add_option("--k", f.k, "number of clusters");
  app->add_option("--out", f.out, "output directory");
  app->add_flag("--route-study", f.route_study, "run the route comparison study");
  app->add_option("--exhaustive-limit", f.exhaustive_limit, "largest stop count routed by full enumeration");
  app->add_option("--segment-capacity", f.segment_capacity, "routes evaluated per segment");
  app->add_option("--route-order-size", f.route_order_size, "products in the route-study order");
  app->add_option("--route-every", f.route_every, "also route every n-th iteration");
  app->add_option("--resamples", f.resamples, "permutation-test resample budget");
  app->add_flag("--keep-events", f.keep_events, "write per-relocation event logs");
}

std::vector<int> parse_experiments(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      throw wsro::ConfigError("bad experiment list '" + s + "'");
    }
  }
  return out;
}

wsro::ExperimentConfig resolve(const Flags& f, bool route_study) {
  wsro::ExperimentConfig c;
  if (route_study) c.iterations = 300;
  if (!f.config.empty()) c = wsro::load_config_file(f.config, c);
  if (f.scale) c.set_scale(wsro::parse_scale(*f.scale));
  if (f.experiment) c.experiments = parse_experiments(*f.experiment);
  if (f.iterations) c.iterations = *f.iterations;
  if (f.runs) c.runs = *f.runs;
  if (f.seed_state) c.seed_state = *f.seed_state;
  if (f.seed_orders) c.seed_orders = *f.seed_orders;
  if (f.seed_kmeans) c.seed_kmeans = *f.seed_kmeans;
  if (f.seed_stats) c.seed_stats = *f.seed_stats;
  if (f.k) c.k = *f.k;
  if (f.out) c.out = *f.out;
  if (f.exhaustive_limit) c.exhaustive_limit = *f.exhaustive_limit;
  if (f.segment_capacity) c.segment_capacity = *f.segment_capacity;
  if (f.route_order_size) c.route_order_size = *f.route_order_size;
  if (f.route_every) c.route_every = *f.route_every;
  if (f.resamples) c.resamples = *f.resamples;
  if (f.keep_events) c.keep_events = true;
  if (route_study) c.route_study = true;
  c.validate();
  return c;
}

int do_experiment(const wsro::ExperimentConfig& c) {
  const auto res = wsro::run_experiment(c);
  wsro::write_stats_report(std::cout, res);
  std::cout << "\nwrote " << c.out << "\n";
  return 0;
}

int do_route_study(const wsro::ExperimentConfig& c) {
  const auto res = wsro::run_route_study(c);
  std::ifstream f(std::filesystem::path(c.out) / "stats.txt");
  std::cout << f.rdbuf() << "\nwrote " << c.out << "\n";
  return res.final_ratios.empty() ? 1 : 0;
}

int do_validate(const wsro::ExperimentConfig& c) {
  const auto rep = wsro::validate_invariants(c);
  for (const auto& chk : rep.checks) {
    std::printf("%-20s %s (%llu checks)\n", chk.name.c_str(), chk.passed() ? "ok" : "FAILED",
                static_cast<unsigned long long>(chk.checked));
    for (const auto& m : chk.failures) std::printf("    %s\n", m.c_str());
  }
  return rep.passed() ? 0 : 1;
}

int do_replay(const std::string& manifest, const std::string& out) {
  const auto r = wsro::replay(manifest, out);
  for (const auto& m : r.mismatched) std::cout << "differs: " << m << "\n";
  for (const auto& m : r.missing) std::cout << "missing: " << m << "\n";
  for (const auto& m : r.extra) std::cout << "unexpected: " << m << "\n";
  std::cout << (r.identical() ? "replay identical" : "replay differs") << "\n";
  return r.identical() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Warehouse slotting by order-driven relocation: experiments and route study"};
  app.require_subcommand(1);

  Flags ef, rf, vf;
  auto* exp = app.add_subcommand("experiment", "run Experiments 1-3 and write trajectories and statistics");
  add_config_flags(exp, ef);
  auto* rs = app.add_subcommand("route-study", "compare clustered and optimal picking routes");
  add_config_flags(rs, rf);
  auto* val = app.add_subcommand("validate", "run the invariant suite over configured runs");
  add_config_flags(val, vf);
  std::string manifest, replay_out = "replay";
  auto* rep = app.add_subcommand("replay", "re-run a manifest and compare output digests");
  rep->add_option("manifest", manifest, "manifest.json of a previous run")->required()->check(CLI::ExistingFile);
  rep->add_option("--out", replay_out, "output directory for the re-run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (exp->parsed()) {
      const auto c = resolve(ef, ef.route_study);
      return c.route_study ? do_route_study(c) : do_experiment(c);
    }
    if (rs->parsed()) return do_route_study(resolve(rf, true));
    if (val->parsed()) {
      auto c = resolve(vf, vf.route_study);
      if (!vf.iterations && vf.config.empty() && !vf.route_study) c.iterations = 50;
      if (!vf.runs && vf.config.empty()) c.runs = 2;
      if (!vf.experiment && vf.config.empty()) c.experiments = {1, 2, 3};
      return do_validate(c);
    }
    if (rep->parsed()) return do_replay(manifest, replay_out);
  } catch (const wsro::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
