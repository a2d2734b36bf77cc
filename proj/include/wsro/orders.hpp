#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wsro/error.hpp"
#include "wsro/grid.hpp"
#include "wsro/rng.hpp"

namespace wsro {

struct OrderLine {
  ArticleId article = 0;
  Parcels quantity = 0;

  friend bool operator==(const OrderLine&, const OrderLine&) = default;
};

struct PurchaseOrder {
  std::vector<OrderLine> lines;

  friend bool operator==(const PurchaseOrder&, const PurchaseOrder&) = default;
};

// A picking order: a batch of purchase orders. Lines keep insertion order,
// which defines "first line" for the fixed-slot perturbation.
class Order {
 public:
  Order() = default;
  explicit Order(std::vector<PurchaseOrder> purchases) : purchases_(std::move(purchases)) {}

  const std::vector<PurchaseOrder>& purchases() const noexcept { return purchases_; }
  std::vector<PurchaseOrder>& purchases() noexcept { return purchases_; }

  // Parcels per article, summed over purchase orders, sorted by article id.
  std::vector<OrderLine> totals() const {
    std::map<ArticleId, Parcels> acc;
    for (const auto& p : purchases_)
      for (const auto& l : p.lines) acc[l.article] += l.quantity;
    std::vector<OrderLine> out;
    out.reserve(acc.size());
    for (const auto& [a, q] : acc)
      if (q > 0) out.push_back({a, q});
    return out;
  }

  // Dense o = (m_1, ..., m_N); index 0 unused.
  std::vector<Parcels> dense(ArticleId article_count) const {
    std::vector<Parcels> m(static_cast<std::size_t>(article_count) + 1, 0);
    for (const auto& p : purchases_)
      for (const auto& l : p.lines) {
        if (l.article == kEmpty || l.article > article_count)
          throw ConfigError("order references article " + std::to_string(l.article) +
                            " outside [1, " + std::to_string(article_count) + "]");
        m[l.article] += l.quantity;
      }
    return m;
  }

  std::uint64_t parcel_count() const noexcept {
    std::uint64_t s = 0;
    for (const auto& p : purchases_)
      for (const auto& l : p.lines) s += l.quantity;
    return s;
  }

  std::size_t line_count() const noexcept {
    std::size_t s = 0;
    for (const auto& p : purchases_) s += p.lines.size();
    return s;
  }

  bool empty() const noexcept { return line_count() == 0; }

  friend bool operator==(const Order&, const Order&) = default;

 private:
  std::vector<PurchaseOrder> purchases_;
};

struct OrderShape {
  std::size_t purchase_count = 20;
  std::size_t lines_per_purchase = 10;
  Parcels max_quantity = 10;

  std::size_t article_types() const noexcept { return purchase_count * lines_per_purchase; }
};

// Pairwise disjoint purchase orders with uniform quantities in [1, max_quantity].
inline Order generate_base_order(ArticleId article_count, std::uint64_t seed,
                                 const OrderShape& shape = {}) {
  const auto needed = shape.article_types();
  if (article_count < needed)
    throw ConfigError("need at least " + std::to_string(needed) + " article types, have " +
                      std::to_string(article_count));
  if (shape.max_quantity < 1) throw ConfigError("max order quantity must be >= 1");
  Rng rng(seed);

  // Partial Fisher-Yates over [1, N] for `needed` distinct types.
  std::vector<ArticleId> pool(article_count);
  for (ArticleId n = 0; n < article_count; ++n) pool[n] = n + 1;
  for (std::size_t t = 0; t < needed; ++t) {
    const auto pick = t + uniform_below(rng, pool.size() - t);
    std::swap(pool[t], pool[pick]);
  }

  std::vector<PurchaseOrder> purchases(shape.purchase_count);
  std::size_t t = 0;
  for (auto& p : purchases) {
    p.lines.reserve(shape.lines_per_purchase);
    for (std::size_t l = 0; l < shape.lines_per_purchase; ++l) {
      const auto q = static_cast<Parcels>(uniform_int(rng, 1, shape.max_quantity));
      p.lines.push_back({pool[t++], q});
    }
  }
  return Order(std::move(purchases));
}

enum class Perturbation { None, FixedSlot, RandomSlot };

inline const char* to_string(Perturbation p) {
  switch (p) {
    case Perturbation::None: return "none";
    case Perturbation::FixedSlot: return "fixed-slot";
    case Perturbation::RandomSlot: return "random-slot";
  }
  return "?";
}

// Experiment number (1, 2, 3) to its order perturbation.
inline Perturbation perturbation_for_experiment(int experiment) {
  switch (experiment) {
    case 1: return Perturbation::None;
    case 2: return Perturbation::FixedSlot;
    case 3: return Perturbation::RandomSlot;
  }
  throw ConfigError("experiment must be 1, 2 or 3");
}

// The order sequence omega = (o_1, o_2, ...). Each call to next() applies
// the shift: it returns the head of the remaining sequence and advances.
class OrderStream {
 public:
  OrderStream(Order base, Perturbation model, std::uint64_t seed, ArticleId article_count,
              Parcels max_quantity = 10)
      : base_(std::move(base)),
        model_(model),
        rng_(seed),
        article_count_(article_count),
        max_quantity_(max_quantity) {}

  Order next() {
    ++position_;
    if (model_ == Perturbation::None) return base_;
    Order o = base_;
    for (auto& p : o.purchases()) {
      if (p.lines.empty()) continue;
      const std::size_t slot =
          model_ == Perturbation::FixedSlot ? 0 : uniform_below(rng_, p.lines.size());
      ArticleId draw;
      bool clash;
      do {
        draw = static_cast<ArticleId>(uniform_int(rng_, 1, article_count_));
        clash = false;
        for (std::size_t l = 0; l < p.lines.size(); ++l)
          if (l != slot && p.lines[l].article == draw) clash = true;
      } while (clash);
      p.lines[slot] = {draw, static_cast<Parcels>(uniform_int(rng_, 1, max_quantity_))};
    }
    return o;
  }

  // Number of orders already drawn.
  std::size_t position() const noexcept { return position_; }
  const Order& base() const noexcept { return base_; }
  Perturbation model() const noexcept { return model_; }

 private:
  Order base_;
  Perturbation model_;
  Rng rng_;
  ArticleId article_count_;
  Parcels max_quantity_;
  std::size_t position_ = 0;
};

inline Order next_order(OrderStream& stream) { return stream.next(); }

// Multiset symmetric difference of article types over both orders' lines,
// divided by the combined line count.
inline double order_diff_fraction(const Order& a, const Order& b) {
  std::map<ArticleId, long> count;
  for (const auto& p : a.purchases())
    for (const auto& l : p.lines) ++count[l.article];
  for (const auto& p : b.purchases())
    for (const auto& l : p.lines) --count[l.article];
  long diff = 0;
  for (const auto& [art, c] : count) diff += c < 0 ? -c : c;
  const auto total = a.line_count() + b.line_count();
  return total == 0 ? 0.0 : static_cast<double>(diff) / static_cast<double>(total);
}

// Text format: "article_id,quantity" per line, purchase orders separated by
// a blank line.
inline void write_order_text(std::ostream& os, const Order& order) {
  bool first = true;
  for (const auto& p : order.purchases()) {
    if (!first) os << '\n';
    first = false;
    for (const auto& l : p.lines) os << l.article << ',' << l.quantity << '\n';
  }
}

inline Order read_order_text(std::istream& is) {
  std::vector<PurchaseOrder> purchases;
  PurchaseOrder current;
  std::string line;
  std::size_t lineno = 0;
  auto flush = [&] {
    if (!current.lines.empty()) purchases.push_back(std::move(current));
    current = {};
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    std::istringstream ls(line);
    long long art = -1, qty = -1;
    char comma = 0;
    if (!(ls >> art >> comma >> qty) || comma != ',' || art < 1 || qty < 1 || art > 0xffffffffLL ||
        qty > 0xffffffffLL)
      throw DecodeError("bad order line " + std::to_string(lineno) + ": '" + line + "'");
    current.lines.push_back({static_cast<ArticleId>(art), static_cast<Parcels>(qty)});
  }
  flush();
  return Order(std::move(purchases));
}

inline std::string order_to_text(const Order& o) {
  std::ostringstream os;
  write_order_text(os, o);
  return os.str();
}

inline Order order_from_text(const std::string& s) {
  std::istringstream is(s);
  return read_order_text(is);
}

}  // namespace wsro
