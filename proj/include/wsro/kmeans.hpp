#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "wsro/error.hpp"
#include "wsro/rng.hpp"

namespace wsro {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

constexpr double squared_distance(const Point2& a, const Point2& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(const Point2& a, const Point2& b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

struct KMeansResult {
  std::vector<int> assignment;   // cluster index in [0, K) per point
  std::vector<Point2> centroids;
  int iterations = 0;
  bool converged = false;
  // Within-cluster sum of squares after each assignment step.
  std::vector<double> inertia;
};

inline constexpr int kMaxLloydIterations = 100;

// k-means++ seeding: first center uniform, then D^2-weighted draws.
inline std::vector<Point2> kmeans_pp_seed(std::span<const Point2> points, int k, Rng& rng) {
  std::vector<Point2> centers;
  centers.reserve(static_cast<std::size_t>(k));
  centers.push_back(points[uniform_below(rng, points.size())]);
  std::vector<double> d2(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) d2[p] = squared_distance(points[p], centers[0]);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t chosen = 0;
    if (total <= 0.0) {
      chosen = uniform_below(rng, points.size());
    } else {
      const double target = uniform_unit(rng) * total;
      double acc = 0.0;
      for (std::size_t p = 0; p < points.size(); ++p) {
        if (d2[p] <= 0.0) continue;
        acc += d2[p];
        chosen = p;  // rounding fallback: last positive-weight point
        if (acc > target) break;
      }
    }
    centers.push_back(points[chosen]);
    for (std::size_t p = 0; p < points.size(); ++p)
      d2[p] = std::min(d2[p], squared_distance(points[p], centers.back()));
  }
  return centers;
}

// Lloyd iterations from given centroids. Stops when assignments repeat or
// after max_iterations update steps. After the mean update, each empty
// cluster is re-seeded at the point farthest from its assigned centroid.
inline KMeansResult lloyd(std::span<const Point2> points, std::vector<Point2> centroids,
                          int max_iterations = kMaxLloydIterations) {
  const auto k = centroids.size();
  KMeansResult r;
  r.centroids = std::move(centroids);
  r.assignment.assign(points.size(), -1);

  auto nearest = [&](const Point2& p) {
    int best = 0;
    double bd = squared_distance(p, r.centroids[0]);
    for (std::size_t c = 1; c < k; ++c) {
      const double d = squared_distance(p, r.centroids[c]);
      if (d < bd) {
        bd = d;
        best = static_cast<int>(c);
      }
    }
    return best;
  };

  std::vector<int> next(points.size());
  for (int it = 0; it <= max_iterations; ++it) {
    double wcss = 0.0;
    for (std::size_t p = 0; p < points.size(); ++p) {
      next[p] = nearest(points[p]);
      wcss += squared_distance(points[p], r.centroids[static_cast<std::size_t>(next[p])]);
    }
    r.inertia.push_back(wcss);
    if (next == r.assignment) {
      r.converged = true;
      break;
    }
    r.assignment = next;
    if (it == max_iterations) break;
    r.iterations = it + 1;

    std::vector<Point2> sum(k);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t p = 0; p < points.size(); ++p) {
      const auto c = static_cast<std::size_t>(r.assignment[p]);
      sum[c].x += points[p].x;
      sum[c].y += points[p].y;
      ++count[c];
    }
    for (std::size_t c = 0; c < k; ++c)
      if (count[c] > 0)
        r.centroids[c] = {sum[c].x / static_cast<double>(count[c]),
                          sum[c].y / static_cast<double>(count[c])};
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] > 0) continue;
      std::size_t far = 0;
      double fd = -1.0;
      for (std::size_t p = 0; p < points.size(); ++p) {
        const double d = squared_distance(
            points[p], r.centroids[static_cast<std::size_t>(r.assignment[p])]);
        if (d > fd) {
          fd = d;
          far = p;
        }
      }
      r.centroids[c] = points[far];
    }
  }
  return r;
}

inline KMeansResult kmeans(std::span<const Point2> points, int k, std::uint64_t seed,
                           int max_iterations = kMaxLloydIterations) {
  if (k < 1) throw ConfigError("k-means needs K >= 1");
  if (points.size() < static_cast<std::size_t>(k))
    throw ConfigError("k-means needs at least K points (" + std::to_string(points.size()) +
                      " < " + std::to_string(k) + ")");
  Rng rng(seed);
  return lloyd(points, kmeans_pp_seed(points, k, rng), max_iterations);
}

}  // namespace wsro
