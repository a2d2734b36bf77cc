#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "wsro/error.hpp"
#include "wsro/grid.hpp"
#include "wsro/rng.hpp"

namespace wsro {

struct StateConfig {
  GridDims dims;
  ArticleId article_count = 1;
  // Per-article capacity M_n, indexed by article id. Entry 0 is ignored.
  // Empty means every article uses default_max_balance.
  std::vector<Parcels> max_balance;
  Parcels default_max_balance = 10;
  std::size_t empty_rack_count = 0;
  std::uint64_t rng_seed = 0;

  Parcels capacity_of(ArticleId n) const {
    return max_balance.empty() ? default_max_balance : max_balance.at(n);
  }

  void validate() const {
    dims.validate();
    if (article_count < 1) throw ConfigError("article count must be >= 1");
    if (empty_rack_count > dims.rack_count())
      throw ConfigError("more empty racks requested than racks in the grid");
    const std::size_t stocked =
        dims.node_count() - static_cast<std::size_t>(dims.nz) * empty_rack_count;
    if (stocked != article_count)
      throw ConfigError("article count " + std::to_string(article_count) +
                        " does not match the " + std::to_string(stocked) +
                        " non-empty nodes");
    if (max_balance.empty()) {
      if (default_max_balance < 1) throw ConfigError("max balance must be >= 1");
    } else {
      if (max_balance.size() != static_cast<std::size_t>(article_count) + 1)
        throw ConfigError("max_balance table must have article_count + 1 entries");
      for (std::size_t n = 1; n < max_balance.size(); ++n)
        if (max_balance[n] < 1) throw ConfigError("max balance must be >= 1");
    }
  }

  // 10x10x10, 890 articles, 11 empty racks.
  static StateConfig small(std::uint64_t seed = 0) {
    return {{10, 10, 10}, 890, {}, 10, 11, seed};
  }
  // 100x100x10, 89000 articles, 1100 empty racks.
  static StateConfig large(std::uint64_t seed = 0) {
    return {{100, 100, 10}, 89000, {}, 10, 1100, seed};
  }
};

// Article placement A and balances M over the node grid, plus the inverse
// article -> node index. Each article lives at exactly one node.
class WarehouseState {
 public:
  WarehouseState() = default;

  WarehouseState(GridDims dims, std::vector<Parcels> capacity)
      : dims_(dims),
        capacity_(std::move(capacity)),
        articles_(dims.node_count(), kEmpty),
        balances_(dims.node_count(), 0),
        location_(capacity_.size(), kUnplaced) {
    dims_.validate();
    if (capacity_.empty()) throw ConfigError("capacity table must include slot 0");
  }

  const GridDims& dims() const noexcept { return dims_; }
  ArticleId article_count() const noexcept {
    return static_cast<ArticleId>(capacity_.size() - 1);
  }
  std::size_t node_count() const noexcept { return articles_.size(); }

  Parcels capacity(ArticleId n) const { return capacity_.at(n); }
  const std::vector<Parcels>& capacities() const noexcept { return capacity_; }

  ArticleId article_at(const Coord& c) const { return articles_[checked_index(c)]; }
  Parcels balance_at(const Coord& c) const { return balances_[checked_index(c)]; }
  ArticleId article_at(std::size_t node) const { return articles_.at(node); }
  Parcels balance_at(std::size_t node) const { return balances_.at(node); }

  const std::vector<ArticleId>& article_array() const noexcept { return articles_; }
  const std::vector<Parcels>& balance_array() const noexcept { return balances_; }

  bool is_placed(ArticleId n) const noexcept {
    return n != kEmpty && n < location_.size() && location_[n] != kUnplaced;
  }

  Coord locate(ArticleId n) const {
    if (!is_placed(n))
      throw NotFoundError("article " + std::to_string(n) + " is not stored in the warehouse");
    return node_coord(dims_, location_[n]);
  }

  std::size_t locate_index(ArticleId n) const {
    if (!is_placed(n))
      throw NotFoundError("article " + std::to_string(n) + " is not stored in the warehouse");
    return location_[n];
  }

  std::uint64_t total_stock() const noexcept {
    return std::accumulate(balances_.begin(), balances_.end(), std::uint64_t{0});
  }

  void set_balance(const Coord& c, Parcels b) {
    const auto idx = checked_index(c);
    if (articles_[idx] == kEmpty && b != 0)
      throw Error("cannot stock an empty node at " + to_string(c));
    if (b > capacity_[articles_[idx]])
      throw Error("balance exceeds capacity at " + to_string(c));
    balances_[idx] = b;
  }

  // Puts an unplaced article on an empty node.
  void place(ArticleId n, const Coord& at, Parcels balance) {
    if (n == kEmpty || n >= location_.size())
      throw NotFoundError("article " + std::to_string(n) + " out of range");
    if (is_placed(n)) throw Error("article " + std::to_string(n) + " is already placed");
    const auto idx = checked_index(at);
    if (articles_[idx] != kEmpty) throw Error("node " + to_string(at) + " is occupied");
    if (balance > capacity_[n]) throw Error("balance exceeds capacity");
    articles_[idx] = n;
    balances_[idx] = balance;
    location_[n] = static_cast<std::uint32_t>(idx);
  }

  // Moves an article to an empty node; the old node becomes empty with zero
  // balance. Returns the parcels left behind at the old node.
  Parcels move_article(ArticleId n, const Coord& to, Parcels new_balance) {
    const auto from = locate_index(n);
    const auto idx = checked_index(to);
    if (idx == from) throw Error("relocation target equals source");
    if (articles_[idx] != kEmpty) throw Error("relocation target " + to_string(to) + " is occupied");
    if (new_balance > capacity_[n]) throw Error("balance exceeds capacity");
    const Parcels residue = balances_[from];
    articles_[from] = kEmpty;
    balances_[from] = 0;
    articles_[idx] = n;
    balances_[idx] = new_balance;
    location_[n] = static_cast<std::uint32_t>(idx);
    return residue;
  }

  // Invariant violations, empty when the state is consistent.
  std::vector<std::string> check_invariants() const {
    std::vector<std::string> problems;
    std::vector<std::uint32_t> seen(location_.size(), kUnplaced);
    for (std::size_t idx = 0; idx < articles_.size(); ++idx) {
      const ArticleId a = articles_[idx];
      const Coord c = node_coord(dims_, idx);
      if (a >= capacity_.size()) {
        problems.push_back("article id out of range at " + to_string(c));
        continue;
      }
      if (a == kEmpty) {
        if (balances_[idx] != 0) problems.push_back("empty node with stock at " + to_string(c));
        continue;
      }
      if (balances_[idx] > capacity_[a]) problems.push_back("balance over capacity at " + to_string(c));
      if (seen[a] != kUnplaced)
        problems.push_back("article " + std::to_string(a) + " stored at two nodes");
      seen[a] = static_cast<std::uint32_t>(idx);
    }
    if (seen != location_) problems.push_back("article index inconsistent with placement array");
    return problems;
  }

  void validate() const {
    auto problems = check_invariants();
    if (!problems.empty()) throw Error("invalid warehouse state: " + problems.front());
  }

  friend bool operator==(const WarehouseState& a, const WarehouseState& b) {
    return a.dims_ == b.dims_ && a.capacity_ == b.capacity_ && a.articles_ == b.articles_ &&
           a.balances_ == b.balances_;
  }

 private:
  static constexpr std::uint32_t kUnplaced = 0xffffffffu;

  std::size_t checked_index(const Coord& c) const {
    if (!contains(dims_, c)) throw Error("coordinate " + to_string(c) + " outside grid");
    return node_index(dims_, c);
  }

  GridDims dims_{};
  std::vector<Parcels> capacity_{0};
  std::vector<ArticleId> articles_;
  std::vector<Parcels> balances_;
  std::vector<std::uint32_t> location_{kUnplaced};
};

inline std::vector<Parcels> capacity_table(const StateConfig& config) {
  std::vector<Parcels> table(static_cast<std::size_t>(config.article_count) + 1, 0);
  for (ArticleId n = 1; n <= config.article_count; ++n) table[n] = config.capacity_of(n);
  return table;
}

// Random initial state: empty_rack_count whole racks left empty, every other
// node holds a distinct article at full balance.
inline WarehouseState init_random_state(const StateConfig& config) {
  config.validate();
  const auto& d = config.dims;
  WarehouseState state(d, capacity_table(config));
  Rng rng(config.rng_seed);

  std::vector<std::size_t> racks(d.rack_count());
  std::iota(racks.begin(), racks.end(), std::size_t{0});
  // Partial Fisher-Yates: first empty_rack_count entries become the empty racks.
  for (std::size_t r = 0; r < config.empty_rack_count; ++r) {
    const auto pick = r + uniform_below(rng, racks.size() - r);
    std::swap(racks[r], racks[pick]);
  }
  std::vector<char> rack_empty(d.rack_count(), 0);
  for (std::size_t r = 0; r < config.empty_rack_count; ++r) rack_empty[racks[r]] = 1;

  std::vector<ArticleId> ids(config.article_count);
  std::iota(ids.begin(), ids.end(), ArticleId{1});
  shuffle_range(rng, ids.begin(), ids.end());

  std::size_t next = 0;
  for (std::size_t idx = 0; idx < d.node_count(); ++idx) {
    if (rack_empty[idx / static_cast<std::size_t>(d.nz)]) continue;
    const ArticleId n = ids[next++];
    state.place(n, node_coord(d, idx), state.capacity(n));
  }
  return state;
}

// Empty nodes in lexicographic (i, j, k) order.
inline std::vector<Coord> find_empty_nodes(const WarehouseState& state) {
  std::vector<Coord> out;
  const auto& a = state.article_array();
  for (std::size_t idx = 0; idx < a.size(); ++idx)
    if (a[idx] == kEmpty) out.push_back(node_coord(state.dims(), idx));
  return out;
}

inline Coord locate_article(const WarehouseState& state, ArticleId n) { return state.locate(n); }

}  // namespace wsro
