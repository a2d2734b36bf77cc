#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <vector>

#include "wsro/error.hpp"
#include "wsro/kmeans.hpp"

namespace wsro {

// Per-point silhouette values s(i) = (b - a) / max(a, b) with Euclidean
// distances. Points alone in their cluster score 0.
inline std::vector<double> silhouette_samples(std::span<const Point2> points,
                                              std::span<const int> labels) {
  if (points.size() != labels.size()) throw StatsError("points and labels differ in length");
  std::map<int, int> slot;
  for (int l : labels) slot.emplace(l, 0);
  if (slot.size() < 2) throw StatsError("silhouette needs at least two clusters");
  int next = 0;
  for (auto& [l, s] : slot) s = next++;
  const auto m = slot.size();

  std::vector<int> lab(points.size());
  std::vector<std::size_t> size(m, 0);
  for (std::size_t p = 0; p < points.size(); ++p) {
    lab[p] = slot[labels[p]];
    ++size[static_cast<std::size_t>(lab[p])];
  }

  std::vector<double> s(points.size(), 0.0);
  const auto n = static_cast<long>(points.size());
#pragma omp parallel for schedule(static)
  for (long ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto own = static_cast<std::size_t>(lab[i]);
    if (size[own] <= 1) continue;
    std::vector<double> sum(m, 0.0);
    for (std::size_t j = 0; j < points.size(); ++j)
      if (j != i) sum[static_cast<std::size_t>(lab[j])] += distance(points[i], points[j]);
    const double a = sum[own] / static_cast<double>(size[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < m; ++c)
      if (c != own && size[c] > 0) b = std::min(b, sum[c] / static_cast<double>(size[c]));
    const double denom = std::max(a, b);
    s[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return s;
}

// Mean silhouette over all points.
inline double silhouette(std::span<const Point2> points, std::span<const int> labels) {
  const auto s = silhouette_samples(points, labels);
  double total = 0.0;
  for (double v : s) total += v;
  return total / static_cast<double>(s.size());
}

}  // namespace wsro
