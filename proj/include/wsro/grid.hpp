#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>

#include "wsro/error.hpp"

namespace wsro {

using ArticleId = std::uint32_t;  // 0 marks an empty node
using Parcels = std::uint32_t;

inline constexpr ArticleId kEmpty = 0;

// Node counts per axis. i runs over aisles (x), j over rack positions (y),
// k over shelf levels (z).
struct GridDims {
  int nx = 1;
  int ny = 1;
  int nz = 1;

  constexpr std::size_t node_count() const noexcept {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  constexpr std::size_t rack_count() const noexcept {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }

  void validate() const {
    if (nx < 1 || ny < 1 || nz < 1)
      throw ConfigError("grid dimensions must all be >= 1");
    const auto cap = static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max());
    if (static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) > cap ||
        node_count() > cap)
      throw ConfigError("grid too large for 32-bit node indices");
  }

  friend constexpr bool operator==(const GridDims&, const GridDims&) = default;
};

// 1-based node coordinate; ordering is lexicographic on (i, j, k).
struct Coord {
  int i = 1;
  int j = 1;
  int k = 1;

  friend constexpr auto operator<=>(const Coord&, const Coord&) = default;
};

// 1-based rack (stop) position on the floor plane.
struct Stop {
  int i = 1;
  int j = 1;

  friend constexpr auto operator<=>(const Stop&, const Stop&) = default;
};

constexpr Stop stop_of(const Coord& c) noexcept { return {c.i, c.j}; }

inline bool contains(const GridDims& d, const Coord& c) noexcept {
  return c.i >= 1 && c.i <= d.nx && c.j >= 1 && c.j <= d.ny && c.k >= 1 && c.k <= d.nz;
}

inline bool contains(const GridDims& d, const Stop& s) noexcept {
  return s.i >= 1 && s.i <= d.nx && s.j >= 1 && s.j <= d.ny;
}

// Row-major with k fastest, so increasing index is lexicographic (i, j, k).
constexpr std::size_t node_index(const GridDims& d, const Coord& c) noexcept {
  return (static_cast<std::size_t>(c.i - 1) * static_cast<std::size_t>(d.ny) +
          static_cast<std::size_t>(c.j - 1)) *
             static_cast<std::size_t>(d.nz) +
         static_cast<std::size_t>(c.k - 1);
}

constexpr Coord node_coord(const GridDims& d, std::size_t index) noexcept {
  const auto nz = static_cast<std::size_t>(d.nz);
  const auto ny = static_cast<std::size_t>(d.ny);
  const auto k = index % nz;
  const auto ij = index / nz;
  return {static_cast<int>(ij / ny) + 1, static_cast<int>(ij % ny) + 1,
          static_cast<int>(k) + 1};
}

// Flattened floor index used for graph vertices and route exports:
// (j-1)*nx + (i-1), so stop (1,1) is vertex 0.
constexpr std::size_t stop_vertex(const GridDims& d, const Stop& s) noexcept {
  return static_cast<std::size_t>(s.j - 1) * static_cast<std::size_t>(d.nx) +
         static_cast<std::size_t>(s.i - 1);
}

constexpr Stop vertex_stop(const GridDims& d, std::size_t v) noexcept {
  const auto nx = static_cast<std::size_t>(d.nx);
  return {static_cast<int>(v % nx) + 1, static_cast<int>(v / nx) + 1};
}

inline std::string to_string(const Coord& c) {
  return "(" + std::to_string(c.i) + "," + std::to_string(c.j) + "," + std::to_string(c.k) + ")";
}

inline std::string to_string(const Stop& s) {
  return "(" + std::to_string(s.i) + "," + std::to_string(s.j) + ")";
}

}  // namespace wsro
