#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "wsro/error.hpp"
#include "wsro/rng.hpp"

namespace wsro {

inline double mean_of(std::span<const double> x) {
  if (x.empty()) throw StatsError("mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Sample standard deviation (divisor n - 1).
inline double sd_of(std::span<const double> x) {
  if (x.size() < 2) throw StatsError("standard deviation needs at least two values");
  const double m = mean_of(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

struct MeanCI {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

// Student-t interval for the mean.
inline MeanCI mean_ci(std::span<const double> x, double confidence = 0.95) {
  if (x.size() < 2) throw StatsError("confidence interval needs at least two values");
  if (!(confidence > 0.0 && confidence < 1.0)) throw StatsError("confidence must lie in (0, 1)");
  MeanCI r;
  r.n = x.size();
  r.mean = mean_of(x);
  r.sd = sd_of(x);
  const boost::math::students_t t(static_cast<double>(r.n - 1));
  const double q = boost::math::quantile(t, 0.5 + confidence / 2.0);
  const double half = q * r.sd / std::sqrt(static_cast<double>(r.n));
  r.lo = r.mean - half;
  r.hi = r.mean + half;
  return r;
}

struct PermutationResult {
  double p = 1.0;
  double observed = 0.0;       // mean(A) - mean(B)
  bool exhaustive = false;     // every relabelling enumerated
  std::uint64_t evaluated = 0; // relabellings compared against the observed one
};

namespace detail {

inline double abs_mean_gap(std::span<const double> pooled, std::span<const char> in_a, std::size_t na) {
  double sa = 0.0, sb = 0.0;
  for (std::size_t x = 0; x < pooled.size(); ++x) (in_a[x] ? sa : sb) += pooled[x];
  return std::abs(sa / static_cast<double>(na) - sb / static_cast<double>(pooled.size() - na));
}

// C(n, k), saturating at UINT64_MAX.
inline std::uint64_t choose_saturating(std::size_t n, std::size_t k) {
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::size_t x = 1; x <= k; ++x) {
    c = c * (n - k + x) / x;
    if (c > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(c);
}

// Relabellings at least as extreme as the observed one. The slack absorbs
// rounding differences between sums of the same values in another order.
inline bool as_extreme(double stat, double observed) {
  return stat >= observed - 1e-12 * std::max(1.0, std::abs(observed));
}

}  // namespace detail

// Two-sided permutation test on the difference of means. When all
// C(|A|+|B|, |A|) relabellings fit within the resample budget they are
// enumerated and p is exact; otherwise `resamples` random relabellings give
// p = (hits + 1) / (resamples + 1). Resample r draws from its own seed, so
// the result does not depend on thread count.
inline PermutationResult permutation_test(std::span<const double> a, std::span<const double> b,
                                          std::uint64_t resamples = 10000, std::uint64_t seed = 0) {
  if (a.empty() || b.empty()) throw StatsError("permutation test needs two nonempty groups");
  PermutationResult r;
  r.observed = mean_of(a) - mean_of(b);
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size(), na = a.size();
  const double obs = std::abs(r.observed);

  const auto total = detail::choose_saturating(n, na);
  if (total <= resamples) {
    r.exhaustive = true;
    r.evaluated = total;
    std::vector<char> in_a(n, 0);
    std::fill(in_a.begin(), in_a.begin() + static_cast<std::ptrdiff_t>(na), 1);
    std::uint64_t hits = 0;
    // prev_permutation over a 1..10..0 mask walks every size-|A| subset.
    do {
      if (detail::as_extreme(detail::abs_mean_gap(pooled, in_a, na), obs)) ++hits;
    } while (std::prev_permutation(in_a.begin(), in_a.end()));
    r.p = static_cast<double>(hits) / static_cast<double>(total);
    return r;
  }

  r.evaluated = resamples;
  std::uint64_t hits = 0;
  const auto R = static_cast<long long>(resamples);
#pragma omp parallel for schedule(static) reduction(+ : hits)
  for (long long x = 0; x < R; ++x) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(x)));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    shuffle_range(rng, idx.begin(), idx.end());
    std::vector<char> in_a(n, 0);
    for (std::size_t t = 0; t < na; ++t) in_a[idx[t]] = 1;
    if (detail::as_extreme(detail::abs_mean_gap(pooled, in_a, na), obs)) ++hits;
  }
  r.p = static_cast<double>(hits + 1) / static_cast<double>(resamples + 1);
  return r;
}

// p multiplied by the number of comparisons, capped at 1.
inline double bonferroni(double p, std::size_t comparisons) {
  return std::min(1.0, p * static_cast<double>(comparisons));
}

// Mean difference over the pooled standard deviation.
inline double cohens_d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty() || a.size() + b.size() < 3)
    throw StatsError("Cohen's d needs at least three values in total");
  const double ma = mean_of(a), mb = mean_of(b);
  double ss = 0.0;
  for (double v : a) ss += (v - ma) * (v - ma);
  for (double v : b) ss += (v - mb) * (v - mb);
  const double pooled = std::sqrt(ss / static_cast<double>(a.size() + b.size() - 2));
  if (!(pooled > 0.0)) throw StatsError("Cohen's d undefined: pooled SD is zero");
  return (ma - mb) / pooled;
}

// (#{a > b} - #{a < b}) / (|A| |B|)
inline double cliffs_delta(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw StatsError("Cliff's delta needs two nonempty groups");
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sb.begin(), sb.end());
  long long net = 0;
  for (double v : a) {
    const auto below = std::lower_bound(sb.begin(), sb.end(), v) - sb.begin();
    const auto above = sb.end() - std::upper_bound(sb.begin(), sb.end(), v);
    net += below - above;
  }
  return static_cast<double>(net) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

struct Band {
  std::vector<double> mean;
  std::vector<double> sd;  // sample SD; 0 with a single run
};

// Pointwise mean and SD across runs. NaN entries (iterations where a run had
// no value) are left out of that point; a point with no values is NaN.
inline Band average_trajectories(const std::vector<std::vector<double>>& runs) {
  if (runs.empty()) throw StatsError("no trajectories to average");
  const auto len = runs.front().size();
  for (const auto& r : runs)
    if (r.size() != len) throw StatsError("trajectories differ in length");
  Band b;
  b.mean.resize(len);
  b.sd.resize(len);
  std::vector<double> col;
  for (std::size_t t = 0; t < len; ++t) {
    col.clear();
    for (const auto& r : runs)
      if (!std::isnan(r[t])) col.push_back(r[t]);
    if (col.empty()) {
      b.mean[t] = b.sd[t] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    b.mean[t] = mean_of(col);
    b.sd[t] = col.size() < 2 ? 0.0 : sd_of(col);
  }
  return b;
}

// Per-run silhouette improvement.
struct RunSummary {
  int experiment = 0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double initial = 0.0;
  double final_score = 0.0;
  double delta = 0.0;
  std::vector<double> series;
};

inline RunSummary summarize_run(int experiment, std::size_t run, std::uint64_t seed,
                                std::vector<double> series) {
  if (series.empty()) throw StatsError("empty score series");
  RunSummary s;
  s.experiment = experiment;
  s.run = run;
  s.seed = seed;
  s.initial = series.front();
  s.final_score = series.back();
  s.delta = s.final_score - s.initial;
  s.series = std::move(series);
  return s;
}

}  // namespace wsro
