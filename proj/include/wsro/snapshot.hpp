#pragma once

// Versioned binary checkpoint of a WarehouseState.
//
// Layout, all integers little-endian u32:
//   "WSRO" magic, version, nx, ny, nz, N,
//   capacity M_1..M_N,
//   article array A (node_index order), balance array M (same order).

#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "wsro/error.hpp"
#include "wsro/warehouse_state.hpp"

namespace wsro {

inline constexpr std::uint32_t kSnapshotVersion = 1;

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    if (bytes_.size() - pos_ < 4) throw DecodeError("snapshot truncated");
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes_[pos_ + b]) << (8 * b);
    pos_ += 4;
    return v;
  }

  bool at_end() const noexcept { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> snapshot(const WarehouseState& state) {
  std::vector<std::uint8_t> out;
  const auto n = state.article_count();
  out.reserve(4 * (6 + n + 2 * state.node_count()));
  for (char ch : {'W', 'S', 'R', 'O'}) out.push_back(static_cast<std::uint8_t>(ch));
  detail::put_u32(out, kSnapshotVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(state.dims().nx));
  detail::put_u32(out, static_cast<std::uint32_t>(state.dims().ny));
  detail::put_u32(out, static_cast<std::uint32_t>(state.dims().nz));
  detail::put_u32(out, n);
  for (ArticleId a = 1; a <= n; ++a) detail::put_u32(out, state.capacity(a));
  for (auto a : state.article_array()) detail::put_u32(out, a);
  for (auto m : state.balance_array()) detail::put_u32(out, m);
  return out;
}

inline WarehouseState restore(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || bytes[0] != 'W' || bytes[1] != 'S' || bytes[2] != 'R' || bytes[3] != 'O')
    throw DecodeError("not a warehouse snapshot");
  detail::ByteReader in(bytes.subspan(4));
  const auto version = in.u32();
  if (version != kSnapshotVersion)
    throw DecodeError("unsupported snapshot version " + std::to_string(version));

  GridDims dims;
  dims.nx = static_cast<int>(in.u32());
  dims.ny = static_cast<int>(in.u32());
  dims.nz = static_cast<int>(in.u32());
  try {
    dims.validate();
  } catch (const ConfigError& e) {
    throw DecodeError(std::string("bad snapshot header: ") + e.what());
  }
  const auto n = in.u32();
  if (n == 0 || n > dims.node_count() * 64) throw DecodeError("implausible article count");

  std::vector<Parcels> capacity(static_cast<std::size_t>(n) + 1, 0);
  for (ArticleId a = 1; a <= n; ++a) capacity[a] = in.u32();

  WarehouseState state(dims, std::move(capacity));
  std::vector<ArticleId> articles(dims.node_count());
  for (auto& a : articles) a = in.u32();
  std::vector<Parcels> balances(dims.node_count());
  for (auto& m : balances) m = in.u32();
  if (!in.at_end()) throw DecodeError("trailing bytes after snapshot");

  try {
    for (std::size_t idx = 0; idx < articles.size(); ++idx) {
      if (articles[idx] == kEmpty) {
        if (balances[idx] != 0) throw Error("empty node carries stock");
        continue;
      }
      state.place(articles[idx], node_coord(dims, idx), balances[idx]);
    }
  } catch (const Error& e) {
    throw DecodeError(std::string("inconsistent snapshot: ") + e.what());
  }
  return state;
}

// FNV-1a 64-bit, used as a compact state/file digest.
inline std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                             std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t state_digest(const WarehouseState& state) {
  const auto bytes = snapshot(state);
  return fnv1a64(bytes);
}

inline void write_snapshot_file(const std::string& path, const WarehouseState& state) {
  const auto bytes = snapshot(state);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline WarehouseState read_snapshot_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return restore(bytes);
}

}  // namespace wsro
