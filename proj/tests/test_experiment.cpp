#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wsro/experiment.hpp"
#include "wsro/validation.hpp"

using namespace wsro;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("wsro_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  return line;
}

ExperimentConfig quick() {
  ExperimentConfig c;
  c.experiments = {1, 2, 3};
  c.iterations = 12;
  c.runs = 3;
  return c;
}

}  // namespace

TEST(Config, ScalePresetsAndDefaults) {
  ExperimentConfig c;
  EXPECT_EQ(c.run_count(), 10u);
  c.set_scale(Scale::Large);
  EXPECT_EQ(c.dims.nx, 100);
  EXPECT_EQ(c.article_count, 89000u);
  EXPECT_EQ(c.empty_racks, 1100u);
  EXPECT_EQ(c.run_count(), 5u);
  c.runs = 7;
  EXPECT_EQ(c.run_count(), 7u);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ValidationRejectsBadValues) {
  auto c = quick();
  c.iterations = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = quick();
  c.runs = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = quick();
  c.experiments = {4};
  EXPECT_THROW(c.validate(), ConfigError);
  c = quick();
  c.experiments = {1, 1};
  EXPECT_THROW(c.validate(), ConfigError);
  c = quick();
  c.k = 21;
  EXPECT_THROW(c.validate(), ConfigError);
  c = quick();
  c.exhaustive_limit = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, JsonOverlayAndUnknownKeys) {
  ExperimentConfig c;
  apply_json(c, nlohmann::json::parse(R"({"scale":"large","experiment":2,"iterations":7,"seed_state":99})"));
  EXPECT_EQ(c.scale, Scale::Large);
  EXPECT_EQ(c.experiments, std::vector<int>{2});
  EXPECT_EQ(c.iterations, 7u);
  EXPECT_EQ(c.seed_state, 99u);
  EXPECT_THROW(apply_json(c, nlohmann::json::parse(R"({"iteratons":3})")), ConfigError);
  EXPECT_THROW(apply_json(c, nlohmann::json::parse(R"({"iterations":"x"})")), ConfigError);
  EXPECT_THROW(apply_json(c, nlohmann::json::parse(R"({"scale":"huge"})")), ConfigError);

  ExperimentConfig round;
  apply_json(round, to_json(c));
  EXPECT_EQ(to_json(round), to_json(c));
}

TEST(Seeds, RunsArePairedAcrossExperiments) {
  const auto c = quick();
  for (std::size_t r = 0; r < 3; ++r) {
    const auto s1 = run_seeds(c, 1, r), s3 = run_seeds(c, 3, r);
    EXPECT_EQ(s1.state, s3.state);
    EXPECT_EQ(s1.base_order, s3.base_order);
    EXPECT_EQ(s1.kmeans, s3.kmeans);
    EXPECT_NE(s1.stream, s3.stream);
  }
  EXPECT_NE(run_seeds(c, 1, 0).state, run_seeds(c, 1, 1).state);
}

TEST(RunExperiments, PairedStartAndDeterministic) {
  const auto c = quick();
  const auto a = run_experiments(c);
  const auto b = run_experiments(c);
  ASSERT_EQ(a.runs.size(), 3u);
  for (std::size_t r = 0; r < 3; ++r) {
    const auto d1 = a.runs.at(1)[r].trajectory.records.front().state_digest;
    EXPECT_EQ(a.runs.at(2)[r].trajectory.records.front().state_digest, d1);
    EXPECT_EQ(a.runs.at(3)[r].trajectory.records.front().state_digest, d1);
    EXPECT_EQ(a.runs.at(1)[r].base.purchases(), a.runs.at(3)[r].base.purchases());
    for (int e = 1; e <= 3; ++e)
      EXPECT_EQ(state_digest(a.runs.at(e)[r].trajectory.final_state),
                state_digest(b.runs.at(e)[r].trajectory.final_state));
  }
  EXPECT_EQ(a.comparisons.size(), 3u);
  for (const auto& pc : a.comparisons) {
    EXPECT_GE(pc.test.p, 0.0);
    EXPECT_LE(pc.p_adjusted, 1.0);
    EXPECT_GE(pc.p_adjusted, pc.test.p);
  }
  ASSERT_TRUE(a.reports.at(1).delta_ci.has_value());
}

TEST(Artifacts, SchemaAndManifest) {
  auto c = quick();
  c.keep_events = true;
  const auto out = scratch("artifacts");
  c.out = out.string();
  run_experiment(c);
  EXPECT_TRUE(fs::exists(out / "exp1" / "trajectory_run0.csv"));
  EXPECT_TRUE(fs::exists(out / "exp3" / "trajectory_run2.csv"));
  EXPECT_TRUE(fs::exists(out / "exp2" / "events_run1.jsonl"));
  EXPECT_EQ(first_line(out / "summary.csv"),
            "experiment,run,seed_state,seed_orders,seed_kmeans,initial,final,delta,initial_area,final_area,"
            "relocations");
  EXPECT_EQ(first_line(out / "exp1" / "average.csv"), "n,silhouette_mean,silhouette_sd,area_mean,area_sd");
  EXPECT_EQ(first_line(out / "stats.csv"),
            "kind,experiment_a,experiment_b,mean_delta,ci_lo,ci_hi,sd,p,p_adjusted,cohens_d,cliffs_delta,runs");
  EXPECT_EQ(first_line(out / "exp1" / "clusters_run0_first_stops.csv"), "i,j,frequency,cluster");

  std::ifstream sf(out / "summary.csv");
  std::string line;
  std::getline(sf, line);
  int rows = 0;
  while (std::getline(sf, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 10);
  }
  EXPECT_EQ(rows, 9);

  const auto m = nlohmann::json::parse(read_file(out / "manifest.json"));
  EXPECT_EQ(m.at("manifest_version"), kManifestVersion);
  EXPECT_EQ(m.at("runs").size(), 9u);
  EXPECT_TRUE(m.at("files").contains("exp2/trajectory_run1.csv"));
  EXPECT_TRUE(m.at("files").contains("stats.txt"));
  const auto txt = read_file(out / "stats.txt");
  EXPECT_NE(txt.find("Exp 1 vs Exp 3"), std::string::npos);

  const auto first_event = nlohmann::json::parse(first_line(out / "exp1" / "events_run0.jsonl"));
  EXPECT_TRUE(first_event.contains("kind"));
  EXPECT_TRUE(first_event.contains("distance_after"));

  const auto back = read_snapshot_file((out / "exp1" / "final_state_run0.wsro").string());
  EXPECT_TRUE(back.check_invariants().empty());
}

TEST(Replay, IdenticalThenTamperDetected) {
  auto c = quick();
  const auto out = scratch("replay_src");
  c.out = out.string();
  run_experiment(c);
  const auto again = scratch("replay_again");
  const auto r = replay(out / "manifest.json", again);
  EXPECT_TRUE(r.identical());

  auto m = nlohmann::json::parse(read_file(out / "manifest.json"));
  m["config"]["seed_orders"] = 12345;
  const auto tampered = scratch("replay_tampered.json");
  std::ofstream(tampered) << m.dump();
  const auto r2 = replay(tampered, scratch("replay_out2"));
  EXPECT_FALSE(r2.identical());
  EXPECT_FALSE(r2.mismatched.empty());

  m = nlohmann::json::parse(read_file(out / "manifest.json"));
  m["manifest_version"] = kManifestVersion + 1;
  std::ofstream(tampered) << m.dump();
  EXPECT_THROW(replay(tampered, scratch("replay_out3")), DecodeError);
}

TEST(RouteStudy, ClusteredNeverBeatsOptimumAndStopsShrink) {
  ExperimentConfig c;
  c.route_study = true;
  c.iterations = 60;
  c.runs = 3;
  const auto res = run_route_study_results(c);
  ASSERT_EQ(res.runs.size(), 3u);
  for (const auto& rr : res.runs) {
    ASSERT_EQ(rr.rows.size(), 2u);
    for (const auto& row : rr.rows) {
      ASSERT_TRUE(row.optimal && row.clustered);
      EXPECT_GE(*row.clustered, *row.optimal);
      EXPECT_LE(row.stops, 10u);
    }
    EXPECT_LE(rr.rows.back().stops, rr.rows.front().stops);
    ASSERT_TRUE(rr.final_optimal.has_value());
    EXPECT_EQ(route_length(rr.final_dm, rr.final_optimal->order), rr.final_optimal->length);
  }
  for (double q : res.final_ratios) EXPECT_GE(q, 1.0);

  const auto out = scratch("route");
  write_route_study_artifacts(res, out);
  EXPECT_EQ(first_line(out / "route_study.csv"),
            "run,iteration,stops,route_clusters,optimal,optimal_method,clustered,ratio");
  EXPECT_EQ(first_line(out / "route_run0_optimal.csv"), "position,vertex,i,j,cumulative_length");
  EXPECT_TRUE(fs::exists(out / "trajectory_run2.csv"));
}

TEST(Validation, InvariantSuitePasses) {
  auto c = quick();
  c.iterations = 8;
  c.runs = 2;
  const auto rep = validate_invariants(c);
  for (const auto& chk : rep.checks) {
    EXPECT_TRUE(chk.passed()) << chk.name << ": " << (chk.failures.empty() ? "" : chk.failures[0]);
    EXPECT_GT(chk.checked, 0u) << chk.name;
  }
}

TEST(Cli, SubcommandsAndFlagOverrides) {
  const char* cli = std::getenv("WSRO_CLI");
  if (!cli) GTEST_SKIP() << "WSRO_CLI not set";
  const auto dir = scratch("cli");
  fs::create_directories(dir);
  const auto cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"experiments":[1,3],"iterations":4,"runs":2,"out":")" + (dir / "from_file").string() + "\"}";
  auto run = [&](const std::string& args) {
    return std::system((std::string(cli) + " " + args + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
  };
  EXPECT_EQ(run("experiment --config " + cfg.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "from_file" / "exp3" / "trajectory_run1.csv"));
  EXPECT_EQ(run("experiment --config " + cfg.string() + " --experiment 2 --runs 1 --out " + (dir / "flags").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "flags" / "exp2" / "trajectory_run0.csv"));
  EXPECT_FALSE(fs::exists(dir / "flags" / "exp1"));
  EXPECT_FALSE(fs::exists(dir / "flags" / "exp2" / "trajectory_run1.csv"));
  EXPECT_EQ(run("replay " + (dir / "flags" / "manifest.json").string() + " --out " + (dir / "re").string()), 0);
  EXPECT_EQ(run("route-study --runs 1 --iterations 20 --out " + (dir / "rs").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "rs" / "route_study.csv"));
  EXPECT_EQ(run("validate --iterations 3 --runs 1"), 0);
  EXPECT_NE(run("experiment --scale medium"), 0);
  EXPECT_NE(run("experiment --experiment 5 --out " + (dir / "bad").string()), 0);
}
