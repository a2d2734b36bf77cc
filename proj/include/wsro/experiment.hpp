#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsro/clustering.hpp"
#include "wsro/csv.hpp"
#include "wsro/error.hpp"
#include "wsro/orders.hpp"
#include "wsro/routing.hpp"
#include "wsro/snapshot.hpp"
#include "wsro/stats.hpp"
#include "wsro/trajectory.hpp"
#include "wsro/warehouse_state.hpp"

namespace wsro {

inline constexpr const char* kToolVersion = "wsro 0.1.0";
inline constexpr int kManifestVersion = 1;

enum class Scale { Small, Large, Custom };

inline const char* to_string(Scale s) {
  switch (s) {
    case Scale::Small: return "small";
    case Scale::Large: return "large";
    case Scale::Custom: return "custom";
  }
  return "?";
}

inline Scale parse_scale(const std::string& s) {
  if (s == "small") return Scale::Small;
  if (s == "large") return Scale::Large;
  if (s == "custom") return Scale::Custom;
  throw ConfigError("unknown scale '" + s + "' (expected small, large or custom)");
}

struct ExperimentConfig {
  Scale scale = Scale::Small;
  GridDims dims{10, 10, 10};
  ArticleId article_count = 890;
  std::size_t empty_racks = 11;
  Parcels max_balance = 10;

  std::vector<int> experiments{1};
  std::size_t iterations = 100;
  std::optional<std::size_t> runs;  // default 10, or 5 at large scale
  int k = 3;
  std::uint64_t seed_state = 1;
  std::uint64_t seed_orders = 2;
  std::uint64_t seed_kmeans = 3;
  std::uint64_t seed_stats = 4;
  std::string out = "out";

  std::size_t purchase_count = 20;
  std::size_t lines_per_purchase = 10;
  Parcels max_quantity = 10;
  std::uint64_t resamples = 10000;
  bool keep_events = false;

  bool route_study = false;
  std::size_t route_order_size = 10;
  std::size_t route_every = 0;  // also route every n-th iteration when > 0
  unsigned exhaustive_limit = 11;
  std::uint64_t segment_capacity = kDefaultSegmentCapacity;

  std::size_t run_count() const { return runs.value_or(scale == Scale::Large ? 5 : 10); }

  void set_scale(Scale s) {
    scale = s;
    if (s == Scale::Small) {
      dims = {10, 10, 10};
      article_count = 890;
      empty_racks = 11;
    } else if (s == Scale::Large) {
      dims = {100, 100, 10};
      article_count = 89000;
      empty_racks = 1100;
    }
  }

  StateConfig state_config(std::uint64_t seed) const {
    StateConfig c;
    c.dims = dims;
    c.article_count = article_count;
    c.default_max_balance = max_balance;
    c.empty_rack_count = empty_racks;
    c.rng_seed = seed;
    return c;
  }

  OrderShape order_shape() const {
    if (route_study) return {route_order_size, 1, max_quantity};
    return {purchase_count, lines_per_purchase, max_quantity};
  }

  void validate() const {
    state_config(0).validate();
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (run_count() < 1) throw ConfigError("runs must be >= 1");
    if (k < 1) throw ConfigError("k must be >= 1");
    if (experiments.empty()) throw ConfigError("no experiment selected");
    for (int e : experiments) perturbation_for_experiment(e);
    for (std::size_t a = 0; a < experiments.size(); ++a)
      for (std::size_t b = a + 1; b < experiments.size(); ++b)
        if (experiments[a] == experiments[b]) throw ConfigError("experiment listed twice");
    const auto shape = order_shape();
    if (shape.purchase_count < static_cast<std::size_t>(k))
      throw ConfigError("fewer purchase orders than clusters");
    if (shape.lines_per_purchase < 1 || shape.max_quantity < 1)
      throw ConfigError("purchase orders need >= 1 line and quantities >= 1");
    if (shape.article_types() > article_count)
      throw ConfigError("order needs more article types than the warehouse holds");
    if (segment_capacity < 1) throw ConfigError("segment capacity must be >= 1");
    if (exhaustive_limit < 1 || exhaustive_limit > 20)
      throw ConfigError("exhaustive limit must lie in [1, 20]");
    if (resamples < 1) throw ConfigError("resamples must be >= 1");
  }
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["scale"] = to_string(c.scale);
  j["dims"] = {{"nx", c.dims.nx}, {"ny", c.dims.ny}, {"nz", c.dims.nz}};
  j["article_count"] = c.article_count;
  j["empty_racks"] = c.empty_racks;
  j["max_balance"] = c.max_balance;
  j["experiments"] = c.experiments;
  j["iterations"] = c.iterations;
  j["runs"] = c.run_count();
  j["k"] = c.k;
  j["seed_state"] = c.seed_state;
  j["seed_orders"] = c.seed_orders;
  j["seed_kmeans"] = c.seed_kmeans;
  j["seed_stats"] = c.seed_stats;
  j["purchase_count"] = c.purchase_count;
  j["lines_per_purchase"] = c.lines_per_purchase;
  j["max_quantity"] = c.max_quantity;
  j["resamples"] = c.resamples;
  j["keep_events"] = c.keep_events;
  j["route_study"] = c.route_study;
  j["route_order_size"] = c.route_order_size;
  j["route_every"] = c.route_every;
  j["exhaustive_limit"] = c.exhaustive_limit;
  j["segment_capacity"] = c.segment_capacity;
  return j;
}

// Applies the keys present in `j` on top of `c`. Unknown keys are errors.
inline void apply_json(ExperimentConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    if (j.contains("scale")) c.set_scale(parse_scale(j.at("scale").get<std::string>()));
    for (const auto& [key, v] : j.items()) {
      if (key == "scale" || key == "out") {
      } else if (key == "dims") {
        c.dims = {v.at("nx").get<int>(), v.at("ny").get<int>(), v.at("nz").get<int>()};
      } else if (key == "article_count") {
        c.article_count = v.get<ArticleId>();
      } else if (key == "empty_racks") {
        c.empty_racks = v.get<std::size_t>();
      } else if (key == "max_balance") {
        c.max_balance = v.get<Parcels>();
      } else if (key == "experiments" || key == "experiment") {
        c.experiments = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
      } else if (key == "iterations") {
        c.iterations = v.get<std::size_t>();
      } else if (key == "runs") {
        c.runs = v.get<std::size_t>();
      } else if (key == "k") {
        c.k = v.get<int>();
      } else if (key == "seed_state") {
        c.seed_state = v.get<std::uint64_t>();
      } else if (key == "seed_orders") {
        c.seed_orders = v.get<std::uint64_t>();
      } else if (key == "seed_kmeans") {
        c.seed_kmeans = v.get<std::uint64_t>();
      } else if (key == "seed_stats") {
        c.seed_stats = v.get<std::uint64_t>();
      } else if (key == "purchase_count") {
        c.purchase_count = v.get<std::size_t>();
      } else if (key == "lines_per_purchase") {
        c.lines_per_purchase = v.get<std::size_t>();
      } else if (key == "max_quantity") {
        c.max_quantity = v.get<Parcels>();
      } else if (key == "resamples") {
        c.resamples = v.get<std::uint64_t>();
      } else if (key == "keep_events") {
        c.keep_events = v.get<bool>();
      } else if (key == "route_study") {
        c.route_study = v.get<bool>();
      } else if (key == "route_order_size") {
        c.route_order_size = v.get<std::size_t>();
      } else if (key == "route_every") {
        c.route_every = v.get<std::size_t>();
      } else if (key == "exhaustive_limit") {
        c.exhaustive_limit = v.get<unsigned>();
      } else if (key == "segment_capacity") {
        c.segment_capacity = v.get<std::uint64_t>();
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

inline ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {}) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  apply_json(base, j);
  return base;
}

// All seeds of one run; derived from the config seeds and the run index.
struct RunSeeds {
  std::uint64_t state = 0;
  std::uint64_t base_order = 0;
  std::uint64_t stream = 0;
  std::uint64_t kmeans = 0;
};

// Runs with the same index share the initial state and base order across
// experiments; only the perturbation stream differs.
inline RunSeeds run_seeds(const ExperimentConfig& c, int experiment, std::size_t run) {
  RunSeeds s;
  s.state = derive_seed(c.seed_state, run);
  s.base_order = derive_seed(c.seed_orders, run);
  s.stream = derive_seed(s.base_order, static_cast<std::uint64_t>(experiment));
  s.kmeans = derive_seed(c.seed_kmeans, run);
  return s;
}

struct RunResult {
  int experiment = 0;
  std::size_t run = 0;
  RunSeeds seeds;
  Order base;
  Trajectory trajectory;
  RunSummary summary;
  ClusterModel first_clusters;
  ClusterModel last_clusters;
};

inline std::vector<double> silhouette_series(const Trajectory& t) {
  std::vector<double> s;
  for (const auto& r : t.records) s.push_back(r.silhouette);
  return s;
}

inline std::vector<double> area_series(const Trajectory& t) {
  std::vector<double> s;
  for (const auto& r : t.records) s.push_back(r.area);
  return s;
}

// One trajectory of experiment `experiment` (1, 2 or 3).
inline RunResult simulate_run(const ExperimentConfig& c, int experiment, std::size_t run,
                              std::function<void(const StepView&)> extra = {}) {
  RunResult r;
  r.experiment = experiment;
  r.run = run;
  r.seeds = run_seeds(c, experiment, run);
  const auto sc = c.state_config(r.seeds.state);
  auto x0 = init_random_state(sc);
  r.base = generate_base_order(c.article_count, r.seeds.base_order, c.order_shape());
  OrderStream stream(r.base, perturbation_for_experiment(experiment), r.seeds.stream, c.article_count,
                     c.max_quantity);
  RunOptions opt;
  opt.k = c.k;
  opt.kmeans_seed = r.seeds.kmeans;
  opt.keep_events = c.keep_events;
  opt.on_step = [&](const StepView& v) {
    if (v.n == 1) r.first_clusters = v.clusters;
    if (v.n == c.iterations) r.last_clusters = v.clusters;
    if (extra) extra(v);
  };
  r.trajectory = run_main_loop(std::move(x0), stream, c.iterations, opt);
  r.summary = summarize_run(experiment, run, r.seeds.state, silhouette_series(r.trajectory));
  return r;
}

struct PairwiseComparison {
  int a = 0;
  int b = 0;
  PermutationResult test;
  double p_adjusted = 1.0;
  double cohens_d = std::numeric_limits<double>::quiet_NaN();
  double cliffs_delta = 0.0;
};

struct ExperimentReport {
  int experiment = 0;
  std::vector<double> deltas;
  std::optional<MeanCI> delta_ci;  // needs >= 2 runs
  Band silhouette;
  Band area;
};

struct ExperimentResults {
  ExperimentConfig config;
  std::map<int, std::vector<RunResult>> runs;
  std::map<int, ExperimentReport> reports;
  std::vector<PairwiseComparison> comparisons;
};

inline void analyze(ExperimentResults& res) {
  res.reports.clear();
  res.comparisons.clear();
  for (const auto& [e, runs] : res.runs) {
    ExperimentReport rep;
    rep.experiment = e;
    std::vector<std::vector<double>> sil, area;
    for (const auto& r : runs) {
      rep.deltas.push_back(r.summary.delta);
      sil.push_back(r.summary.series);
      area.push_back(area_series(r.trajectory));
    }
    if (rep.deltas.size() >= 2) rep.delta_ci = mean_ci(rep.deltas);
    rep.silhouette = average_trajectories(sil);
    rep.area = average_trajectories(area);
    res.reports[e] = std::move(rep);
  }
  std::vector<int> ex;
  for (const auto& [e, _] : res.reports) ex.push_back(e);
  const std::size_t pairs = ex.size() * (ex.size() - 1) / 2;
  for (std::size_t x = 0; x < ex.size(); ++x)
    for (std::size_t y = x + 1; y < ex.size(); ++y) {
      PairwiseComparison pc;
      pc.a = ex[x];
      pc.b = ex[y];
      const auto& da = res.reports[pc.a].deltas;
      const auto& db = res.reports[pc.b].deltas;
      pc.test = permutation_test(da, db, res.config.resamples,
                                 derive_seed(res.config.seed_stats, static_cast<std::uint64_t>(10 * pc.a + pc.b)));
      pc.p_adjusted = bonferroni(pc.test.p, pairs);
      try {
        pc.cohens_d = cohens_d(da, db);
      } catch (const StatsError&) {
      }
      pc.cliffs_delta = cliffs_delta(da, db);
      res.comparisons.push_back(pc);
    }
}

// Runs every (experiment, run) pair in parallel; results are placed by
// index so the outcome does not depend on scheduling.
inline ExperimentResults run_experiments(const ExperimentConfig& c) {
  c.validate();
  ExperimentResults res;
  res.config = c;
  const auto R = c.run_count();
  const std::size_t jobs = c.experiments.size() * R;
  std::vector<RunResult> all(jobs);
  std::vector<std::string> errors(jobs);
#pragma omp parallel for schedule(dynamic)
  for (long long x = 0; x < static_cast<long long>(jobs); ++x) {
    const auto idx = static_cast<std::size_t>(x);
    try {
      all[idx] = simulate_run(c, c.experiments[idx / R], idx % R);
    } catch (const std::exception& e) {
      errors[idx] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error(e);
  for (std::size_t idx = 0; idx < jobs; ++idx) res.runs[all[idx].experiment].push_back(std::move(all[idx]));
  analyze(res);
  return res;
}

namespace detail {

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::uint64_t file_digest(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw Error("cannot read " + p.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return fnv1a64(bytes);
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  return f;
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec || !std::filesystem::is_directory(root_))
      throw Error("cannot create output directory " + root_.string());
  }

  template <class F>
  void write(const std::string& rel, F&& body) {
    const auto path = root_ / rel;
    std::filesystem::create_directories(path.parent_path());
    {
      auto f = open_out(path);
      body(f);
      if (!f) throw Error("write failed for " + path.string());
    }
    files_[rel] = file_digest(path);
  }

  const std::map<std::string, std::uint64_t>& files() const noexcept { return files_; }
  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path root_;
  std::map<std::string, std::uint64_t> files_;
};

inline nlohmann::json coord_json(const Coord& c) { return {c.i, c.j, c.k}; }

inline void write_events_jsonl(std::ostream& os, const Trajectory& t) {
  for (const auto& rec : t.records)
    for (const auto& e : rec.events) {
      nlohmann::json j;
      j["n"] = rec.n;
      j["article"] = e.article;
      j["kind"] = to_string(e.kind);
      j["from"] = coord_json(e.from);
      j["to"] = coord_json(e.to);
      j["cluster"] = e.cluster;
      j["residue"] = e.residue;
      j["shortfall"] = e.shortfall;
      j["added"] = e.added;
      j["distance_before"] = fmt_real(e.distance_before);
      j["distance_after"] = fmt_real(e.distance_after);
      os << j.dump() << '\n';
    }
}

inline void write_band_csv(std::ostream& os, const ExperimentReport& rep) {
  os << "n,silhouette_mean,silhouette_sd,area_mean,area_sd\n";
  for (std::size_t t = 0; t < rep.silhouette.mean.size(); ++t)
    os << t + 1 << ',' << fmt_real(rep.silhouette.mean[t]) << ',' << fmt_real(rep.silhouette.sd[t])
       << ',' << fmt_real(rep.area.mean[t]) << ',' << fmt_real(rep.area.sd[t]) << '\n';
}

inline nlohmann::json seeds_json(const RunSeeds& s) {
  return {{"state", s.state}, {"base_order", s.base_order}, {"stream", s.stream}, {"kmeans", s.kmeans}};
}

inline void write_manifest(const ArtifactWriter& w, const ExperimentConfig& c, const std::string& mode,
                           const nlohmann::json& runs) {
  nlohmann::json m;
  m["manifest_version"] = kManifestVersion;
  m["tool"] = kToolVersion;
  m["mode"] = mode;
  m["config"] = to_json(c);
  m["runs"] = runs;
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [rel, d] : w.files()) files[rel] = hex64(d);
  m["files"] = files;
  auto f = open_out(w.root() / "manifest.json");
  f << m.dump(2) << '\n';
}

}  // namespace detail

inline void write_stats_report(std::ostream& os, const ExperimentResults& res) {
  const auto& c = res.config;
  os << "Silhouette improvement (final - initial) per run\n";
  os << "scale " << to_string(c.scale) << " (" << c.dims.nx << "x" << c.dims.ny << "x" << c.dims.nz
     << "), " << c.run_count() << " runs, " << c.iterations << " iterations, K=" << c.k << "\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %10s %22s %10s %10s %10s\n", "experiment", "mean", "95% CI",
                "sd", "initial", "final");
  os << line;
  for (const auto& [e, rep] : res.reports) {
    const auto& runs = res.runs.at(e);
    double si = 0, sf = 0;
    for (const auto& r : runs) {
      si += r.summary.initial;
      sf += r.summary.final_score;
    }
    si /= static_cast<double>(runs.size());
    sf /= static_cast<double>(runs.size());
    std::string ci = "n/a";
    double sd = 0.0;
    if (rep.delta_ci) {
      char b[64];
      std::snprintf(b, sizeof b, "[%.4f, %.4f]", rep.delta_ci->lo, rep.delta_ci->hi);
      ci = b;
      sd = rep.delta_ci->sd;
    }
    std::snprintf(line, sizeof line, "%-10s %10.4f %22s %10.4f %10.4f %10.4f\n",
                  ("Exp " + std::to_string(e)).c_str(), mean_of(rep.deltas), ci.c_str(), sd, si, sf);
    os << line;
  }
  if (!res.comparisons.empty()) {
    os << "\nPairwise comparisons on run-level improvements (permutation test, " << c.resamples
       << " resamples, Bonferroni x" << res.comparisons.size() << ")\n";
    for (const auto& pc : res.comparisons) {
      std::snprintf(line, sizeof line,
                    "Exp %d vs Exp %d: diff=%.4f p=%.6f p_adj=%.6f %s d=%.3f cliffs_delta=%.3f\n", pc.a,
                    pc.b, pc.test.observed, pc.test.p, pc.p_adjusted,
                    pc.test.exhaustive ? "(exhaustive)" : "(resampled)", pc.cohens_d, pc.cliffs_delta);
      os << line;
    }
  }
}

inline void write_stats_csv(std::ostream& os, const ExperimentResults& res) {
  os << "kind,experiment_a,experiment_b,mean_delta,ci_lo,ci_hi,sd,p,p_adjusted,cohens_d,cliffs_delta,runs\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& [e, rep] : res.reports) {
    const auto ci = rep.delta_ci.value_or(MeanCI{mean_of(rep.deltas), nan, nan, nan, rep.deltas.size()});
    os << "experiment," << e << ",," << fmt_real(ci.mean) << ',' << fmt_real(ci.lo) << ','
       << fmt_real(ci.hi) << ',' << fmt_real(ci.sd) << ",,,,," << rep.deltas.size() << '\n';
  }
  for (const auto& pc : res.comparisons)
    os << "pair," << pc.a << ',' << pc.b << ',' << fmt_real(pc.test.observed) << ",,,,"
       << fmt_real(pc.test.p) << ',' << fmt_real(pc.p_adjusted) << ',' << fmt_real(pc.cohens_d) << ','
       << fmt_real(pc.cliffs_delta) << ",\n";
}

// Trajectories, averages, summary, stats and a manifest with file digests.
inline void write_experiment_artifacts(const ExperimentResults& res, const std::filesystem::path& out) {
  detail::ArtifactWriter w(out);
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& [e, rs] : res.runs) {
    const std::string dir = "exp" + std::to_string(e) + "/";
    for (const auto& r : rs) {
      const std::string tag = "run" + std::to_string(r.run);
      w.write(dir + "trajectory_" + tag + ".csv", [&](std::ostream& os) { write_trajectory_csv(os, r.trajectory); });
      w.write(dir + "base_order_" + tag + ".txt", [&](std::ostream& os) { write_order_text(os, r.base); });
      w.write(dir + "clusters_" + tag + "_first_stops.csv",
              [&](std::ostream& os) { write_cluster_stops_csv(os, r.first_clusters); });
      w.write(dir + "clusters_" + tag + "_first_centers.csv",
              [&](std::ostream& os) { write_cluster_centers_csv(os, r.first_clusters); });
      w.write(dir + "clusters_" + tag + "_last_stops.csv",
              [&](std::ostream& os) { write_cluster_stops_csv(os, r.last_clusters); });
      w.write(dir + "clusters_" + tag + "_last_centers.csv",
              [&](std::ostream& os) { write_cluster_centers_csv(os, r.last_clusters); });
      w.write(dir + "final_state_" + tag + ".wsro", [&](std::ostream& os) {
        const auto bytes = snapshot(r.trajectory.final_state);
        os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
      });
      if (res.config.keep_events)
        w.write(dir + "events_" + tag + ".jsonl", [&](std::ostream& os) { detail::write_events_jsonl(os, r.trajectory); });
      runs.push_back({{"experiment", e},
                      {"run", r.run},
                      {"seeds", detail::seeds_json(r.seeds)},
                      {"final_state_digest", detail::hex64(state_digest(r.trajectory.final_state))}});
    }
    w.write(dir + "average.csv", [&](std::ostream& os) { detail::write_band_csv(os, res.reports.at(e)); });
  }
  w.write("summary.csv", [&](std::ostream& os) {
    os << "experiment,run,seed_state,seed_orders,seed_kmeans,initial,final,delta,initial_area,final_area,"
          "relocations\n";
    for (const auto& [e, rs] : res.runs)
      for (const auto& r : rs) {
        std::size_t rel = 0;
        for (const auto& rec : r.trajectory.records) rel += rec.relocations;
        os << e << ',' << r.run << ',' << r.seeds.state << ',' << r.seeds.base_order << ','
           << r.seeds.kmeans << ',' << fmt_real(r.summary.initial) << ',' << fmt_real(r.summary.final_score)
           << ',' << fmt_real(r.summary.delta) << ',' << fmt_real(r.trajectory.records.front().area) << ','
           << fmt_real(r.trajectory.records.back().area) << ',' << rel << '\n';
      }
  });
  w.write("stats.txt", [&](std::ostream& os) { write_stats_report(os, res); });
  w.write("stats.csv", [&](std::ostream& os) { write_stats_csv(os, res); });
  detail::write_manifest(w, res.config, "experiment", runs);
}

inline ExperimentResults run_experiment(const ExperimentConfig& c) {
  auto res = run_experiments(c);
  write_experiment_artifacts(res, c.out);
  return res;
}

// ---- route study ----

struct RouteRow {
  std::size_t n = 0;
  std::size_t stops = 0;
  std::optional<Weight> optimal;
  RouteMethod optimal_method = RouteMethod::Exact;
  std::optional<Weight> clustered;
  std::size_t route_clusters = 0;

  double ratio() const {
    if (!optimal || !clustered || *optimal == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(*clustered) / static_cast<double>(*optimal);
  }
};

struct RouteRunResult {
  std::size_t run = 0;
  RunSeeds seeds;
  Order base;
  Trajectory trajectory;
  std::vector<RouteRow> rows;
  DistanceMatrix final_dm;
  std::optional<RoutePlan> final_optimal;
  std::optional<RoutePlan> final_clustered;
};

// Exact optimum (exhaustive, or Held-Karp beyond the exhaustive limit) and
// the cluster-decomposed route for the distinct stops of `model`. Stops are
// divided into min(K, stops) groups by k-means on their floor positions.
inline RouteRow route_step(const ExperimentConfig& c, const GridDims& dims, const EdgeListGraph& g,
                           const ClusterModel& model, std::size_t n, std::uint64_t kmeans_seed,
                           DistanceMatrix* dm_out = nullptr, std::optional<RoutePlan>* opt_out = nullptr,
                           std::optional<RoutePlan>* clu_out = nullptr) {
  RouteRow row;
  row.n = n;
  const auto& stops = model.all.s_stop;
  row.stops = stops.size();
  if (stops.empty()) return row;
  auto dm = pairwise_distances(dims, g, stops);
  const RouteOptions ro{c.exhaustive_limit, c.segment_capacity};

  std::optional<RoutePlan> best;
  if (dm.size() <= c.exhaustive_limit)
    best = exact_open_route(dm, ro);
  else if (dm.size() <= kHeldKarpLimit)
    best = held_karp_open_route(dm);
  if (best) {
    row.optimal = best->length;
    row.optimal_method = best->method;
  }

  std::vector<Point2> pts;
  for (const auto& s : stops) pts.push_back({static_cast<double>(s.i), static_cast<double>(s.j)});
  const int kk = std::min<int>(c.k, static_cast<int>(pts.size()));
  const auto labels = kmeans(pts, kk, derive_seed(kmeans_seed, n)).assignment;
  std::optional<RoutePlan> clu;
  try {
    clu = clustered_route(dm, labels, ro);
    row.clustered = clu->length;
  } catch (const LimitError&) {
  }
  for (int l : labels) row.route_clusters = std::max<std::size_t>(row.route_clusters, static_cast<std::size_t>(l) + 1);
  if (opt_out) *opt_out = best;
  if (clu_out) *clu_out = clu;
  if (dm_out) *dm_out = std::move(dm);
  return row;
}

// Recurring small customer order (Experiment 1 semantics), routed at the
// first and last iteration and every `route_every` iterations in between.
inline RouteRunResult simulate_route_run(const ExperimentConfig& c, std::size_t run) {
  RouteRunResult rr;
  rr.run = run;
  rr.seeds = run_seeds(c, 1, run);
  const auto sc = c.state_config(rr.seeds.state);
  auto x0 = init_random_state(sc);
  rr.base = generate_base_order(c.article_count, rr.seeds.base_order, c.order_shape());
  OrderStream stream(rr.base, Perturbation::None, rr.seeds.stream, c.article_count, c.max_quantity);
  const auto g = build_grid_graph(c.dims);
  RunOptions opt;
  opt.k = c.k;
  opt.kmeans_seed = rr.seeds.kmeans;
  opt.keep_events = c.keep_events;
  opt.on_step = [&](const StepView& v) {
    const bool last = v.n == c.iterations;
    if (!(v.n == 1 || last || (c.route_every > 0 && v.n % c.route_every == 0))) return;
    auto row = last ? route_step(c, c.dims, g, v.clusters, v.n, rr.seeds.kmeans, &rr.final_dm,
                                 &rr.final_optimal, &rr.final_clustered)
                    : route_step(c, c.dims, g, v.clusters, v.n, rr.seeds.kmeans);
    v.record.route_exact = row.optimal;
    v.record.route_clustered = row.clustered;
    rr.rows.push_back(row);
  };
  rr.trajectory = run_main_loop(std::move(x0), stream, c.iterations, opt);
  return rr;
}

struct RouteStudyResults {
  ExperimentConfig config;
  std::vector<RouteRunResult> runs;
  std::vector<double> final_ratios;
  std::optional<MeanCI> ratio_ci;
  double ratio_max = std::numeric_limits<double>::quiet_NaN();
  double mean_stops_first = 0.0;
  double mean_stops_last = 0.0;
  double mean_length_reduction = std::numeric_limits<double>::quiet_NaN();  // clustered route, first -> last
  std::vector<std::string> notes;
};

inline RouteStudyResults run_route_study_results(ExperimentConfig c) {
  c.route_study = true;
  c.experiments = {1};
  c.validate();
  RouteStudyResults res;
  res.config = c;
  const auto R = c.run_count();
  res.runs.resize(R);
  std::vector<std::string> errors(R);
#pragma omp parallel for schedule(dynamic)
  for (long long x = 0; x < static_cast<long long>(R); ++x) {
    try {
      res.runs[static_cast<std::size_t>(x)] = simulate_route_run(c, static_cast<std::size_t>(x));
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(x)] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error(e);

  std::vector<double> red;
  for (const auto& rr : res.runs) {
    const auto& first = rr.rows.front();
    const auto& last = rr.rows.back();
    res.mean_stops_first += static_cast<double>(first.stops) / static_cast<double>(R);
    res.mean_stops_last += static_cast<double>(last.stops) / static_cast<double>(R);
    if (!first.optimal)
      res.notes.push_back("run " + std::to_string(rr.run) + ": " + std::to_string(first.stops) +
                          " stops at iteration 1 exceed the oracle limit; optimum deferred to the final iteration");
    const double q = last.ratio();
    if (!std::isnan(q)) res.final_ratios.push_back(q);
    if (first.clustered && last.clustered && *first.clustered > 0)
      red.push_back(1.0 - static_cast<double>(*last.clustered) / static_cast<double>(*first.clustered));
  }
  if (res.final_ratios.size() >= 2) res.ratio_ci = mean_ci(res.final_ratios);
  if (!res.final_ratios.empty())
    res.ratio_max = *std::max_element(res.final_ratios.begin(), res.final_ratios.end());
  if (!red.empty()) res.mean_length_reduction = mean_of(red);
  return res;
}

inline void write_route_study_artifacts(const RouteStudyResults& res, const std::filesystem::path& out) {
  detail::ArtifactWriter w(out);
  nlohmann::json runs = nlohmann::json::array();
  auto opt_str = [](const std::optional<Weight>& v) { return v ? std::to_string(*v) : std::string(); };
  for (const auto& rr : res.runs) {
    const std::string tag = "run" + std::to_string(rr.run);
    w.write("trajectory_" + tag + ".csv", [&](std::ostream& os) { write_trajectory_csv(os, rr.trajectory); });
    w.write("base_order_" + tag + ".txt", [&](std::ostream& os) { write_order_text(os, rr.base); });
    if (rr.final_optimal)
      w.write("route_" + tag + "_optimal.csv", [&](std::ostream& os) { write_route_csv(os, *rr.final_optimal, rr.final_dm); });
    if (rr.final_clustered)
      w.write("route_" + tag + "_clustered.csv", [&](std::ostream& os) { write_route_csv(os, *rr.final_clustered, rr.final_dm); });
    if (res.config.keep_events)
      w.write("events_" + tag + ".jsonl", [&](std::ostream& os) { detail::write_events_jsonl(os, rr.trajectory); });
    runs.push_back({{"experiment", 1},
                    {"run", rr.run},
                    {"seeds", detail::seeds_json(rr.seeds)},
                    {"final_state_digest", detail::hex64(state_digest(rr.trajectory.final_state))}});
  }
  w.write("route_study.csv", [&](std::ostream& os) {
    os << "run,iteration,stops,route_clusters,optimal,optimal_method,clustered,ratio\n";
    for (const auto& rr : res.runs)
      for (const auto& row : rr.rows)
        os << rr.run << ',' << row.n << ',' << row.stops << ',' << row.route_clusters << ','
           << opt_str(row.optimal) << ',' << (row.optimal ? to_string(row.optimal_method) : "") << ','
           << opt_str(row.clustered) << ',' << fmt_real(row.ratio()) << '\n';
  });
  w.write("summary.csv", [&](std::ostream& os) {
    os << "run,stops_first,stops_last,optimal_first,clustered_first,optimal_last,clustered_last,ratio_last\n";
    for (const auto& rr : res.runs) {
      const auto& f = rr.rows.front();
      const auto& l = rr.rows.back();
      os << rr.run << ',' << f.stops << ',' << l.stops << ',' << opt_str(f.optimal) << ','
         << opt_str(f.clustered) << ',' << opt_str(l.optimal) << ',' << opt_str(l.clustered) << ','
         << fmt_real(l.ratio()) << '\n';
    }
  });
  w.write("stats.txt", [&](std::ostream& os) {
    const auto& c = res.config;
    char line[256];
    os << "Route study: " << c.route_order_size << "-product recurring order, " << c.run_count()
       << " runs, " << c.iterations << " iterations, K=" << c.k << "\n";
    os << "ratio = clustered route length / optimal route length at the final iteration\n\n";
    if (res.ratio_ci) {
      std::snprintf(line, sizeof line, "ratio mean %.4f sd %.4f 95%% CI [%.4f, %.4f] max %.4f (%zu runs)\n",
                    res.ratio_ci->mean, res.ratio_ci->sd, res.ratio_ci->lo, res.ratio_ci->hi, res.ratio_max,
                    res.final_ratios.size());
      os << line;
    } else if (!res.final_ratios.empty()) {
      std::snprintf(line, sizeof line, "ratio %.4f (1 run)\n", res.final_ratios.front());
      os << line;
    }
    std::snprintf(line, sizeof line, "mean stops: %.2f at iteration 1, %.2f at iteration %zu\n",
                  res.mean_stops_first, res.mean_stops_last, c.iterations);
    os << line;
    std::snprintf(line, sizeof line, "mean clustered route length reduction, first to last iteration: %.1f%%\n",
                  100.0 * res.mean_length_reduction);
    os << line;
    for (const auto& n : res.notes) os << "note: " << n << '\n';
  });
  detail::write_manifest(w, res.config, "route-study", runs);
}

inline RouteStudyResults run_route_study(const ExperimentConfig& c) {
  auto res = run_route_study_results(c);
  write_route_study_artifacts(res, c.out);
  return res;
}

// ---- replay ----

struct ReplayReport {
  std::vector<std::string> mismatched;  // differing digests
  std::vector<std::string> missing;     // listed in the manifest, not produced
  std::vector<std::string> extra;       // produced, not listed
  bool identical() const noexcept { return mismatched.empty() && missing.empty() && extra.empty(); }
};

inline ExperimentConfig config_from_manifest(const nlohmann::json& m, std::string* mode = nullptr) {
  if (!m.contains("manifest_version") || m.at("manifest_version").get<int>() != kManifestVersion)
    throw DecodeError("unsupported manifest version");
  if (m.value("tool", std::string()) != kToolVersion)
    throw DecodeError("manifest written by " + m.value("tool", std::string("unknown tool")) + ", not " +
                      kToolVersion);
  ExperimentConfig c;
  apply_json(c, m.at("config"));
  if (mode) *mode = m.value("mode", std::string("experiment"));
  return c;
}

// Re-runs the manifest's configuration into `out` and compares every
// output file digest with the recorded one.
inline ReplayReport replay(const std::filesystem::path& manifest_path, const std::filesystem::path& out) {
  std::ifstream f(manifest_path);
  if (!f) throw Error("cannot open manifest " + manifest_path.string());
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("manifest: ") + e.what());
  }
  std::string mode;
  auto c = config_from_manifest(m, &mode);
  c.out = out.string();
  if (mode == "route-study")
    run_route_study(c);
  else if (mode == "experiment")
    run_experiment(c);
  else
    throw DecodeError("unknown manifest mode '" + mode + "'");

  std::ifstream nf(out / "manifest.json");
  const auto fresh = nlohmann::json::parse(nf);
  ReplayReport r;
  const auto& want = m.at("files");
  const auto& got = fresh.at("files");
  for (const auto& [rel, d] : want.items()) {
    if (!got.contains(rel))
      r.missing.push_back(rel);
    else if (got.at(rel) != d)
      r.mismatched.push_back(rel);
  }
  for (const auto& [rel, d] : got.items())
    if (!want.contains(rel)) r.extra.push_back(rel);
  return r;
}

}  // namespace wsro
