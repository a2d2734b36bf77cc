#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "wsro/error.hpp"

namespace wsro {

// Largest batch the reference GPU kernel could hold in memory.
inline constexpr std::uint64_t kDefaultSegmentCapacity = 2'903'040;

inline std::uint64_t factorial(unsigned n) {
  if (n > 20) throw LimitError(std::to_string(n) + "! does not fit in 64 bits");
  std::uint64_t f = 1;
  for (unsigned x = 2; x <= n; ++x) f *= x;
  return f;
}

struct Segment {
  std::uint64_t start = 0;
  std::uint64_t count = 0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SegmentationPlan {
  std::uint64_t total = 0;
  std::uint64_t capacity = 0;
  std::vector<Segment> ranges;
};

// Consecutive index ranges covering [0, total), none longer than capacity.
inline SegmentationPlan plan_segmentation(std::uint64_t total,
                                          std::uint64_t capacity = kDefaultSegmentCapacity) {
  if (capacity < 1) throw ConfigError("segment capacity must be >= 1");
  SegmentationPlan p;
  p.total = total;
  p.capacity = capacity;
  p.ranges.reserve(static_cast<std::size_t>(total / capacity + 1));
  for (std::uint64_t s = 0; s < total; s += capacity) p.ranges.push_back({s, std::min(capacity, total - s)});
  return p;
}

// Undirected open routes over n stops: n!/2 for n >= 2, otherwise 1.
inline std::uint64_t open_route_count(unsigned n) {
  return n <= 1 ? 1 : factorial(n) / 2;
}

// The open-route space keeps one orientation of every route, the one whose
// first stop is smaller than its last. Index order: endpoint pair (a, b)
// lexicographically, then the middle stops in lexicographic order.
inline std::vector<int> unrank_open_route(unsigned n, std::uint64_t index) {
  if (index >= open_route_count(n)) throw ConfigError("open-route index out of range");
  std::vector<int> perm;
  if (n == 0) return perm;
  if (n == 1) return {0};
  const std::uint64_t block = factorial(n - 2);
  std::uint64_t pair = index / block;
  std::uint64_t rem = index % block;
  int a = 0;
  while (pair >= static_cast<std::uint64_t>(n - 1 - a)) {
    pair -= static_cast<std::uint64_t>(n - 1 - a);
    ++a;
  }
  const int b = a + 1 + static_cast<int>(pair);

  std::vector<int> pool;
  pool.reserve(n - 2);
  for (int x = 0; x < static_cast<int>(n); ++x)
    if (x != a && x != b) pool.push_back(x);
  perm.reserve(n);
  perm.push_back(a);
  for (unsigned t = 0; t + 2 < n; ++t) {
    const std::uint64_t f = factorial(n - 3 - t);
    const auto digit = static_cast<std::size_t>(rem / f);
    rem %= f;
    perm.push_back(pool[digit]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
  }
  perm.push_back(b);
  return perm;
}

// Steps through the open-route space in index order from a given index.
class OpenRouteCursor {
 public:
  OpenRouteCursor(unsigned n, std::uint64_t index) : n_(n), perm_(unrank_open_route(n, index)) {}

  const std::vector<int>& current() const noexcept { return perm_; }

  // Moves to the next index; false past the end.
  bool advance() {
    if (n_ <= 2) return false;
    if (std::next_permutation(perm_.begin() + 1, perm_.end() - 1)) return true;
    int a = perm_.front();
    int b = perm_.back() + 1;
    if (b == static_cast<int>(n_)) {
      ++a;
      b = a + 1;
      if (b >= static_cast<int>(n_)) return false;
    }
    perm_.front() = a;
    perm_.back() = b;
    int x = 0;
    for (std::size_t t = 1; t + 1 < perm_.size(); ++t, ++x) {
      while (x == a || x == b) ++x;
      perm_[t] = x;
    }
    return true;
  }

 private:
  unsigned n_;
  std::vector<int> perm_;
};

}  // namespace wsro
