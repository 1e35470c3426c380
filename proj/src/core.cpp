#include "cda/core.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace cda {

const char* to_string(Command c) {
  switch (c) {
    case Command::Buy: return "Buy";
    case Command::Sell: return "Sell";
    case Command::Del: return "Del";
  }
  return "?";
}

bool more_competitive_bid(const Order& b1, const Order& b2) {
  return b1.price > b2.price || (b1.price == b2.price && b1.timestamp < b2.timestamp);
}

bool more_competitive_ask(const Order& a1, const Order& a2) {
  return a1.price < a2.price || (a1.price == a2.price && a1.timestamp < a2.timestamp);
}

bool tradable(const Order& bid, const Order& ask) { return bid.price >= ask.price; }

bool matchable(const std::vector<Order>& bids, const std::vector<Order>& asks) {
  if (bids.empty() || asks.empty()) return false;
  Price best_bid = 0;
  for (const Order& b : bids) best_bid = std::max(best_bid, b.price);
  Price best_ask = kMaxTick;
  for (const Order& a : asks) best_ask = std::min(best_ask, a.price);
  return best_bid >= best_ask;
}

bool matchable(const OrderDomain& d) { return matchable(d.bids, d.asks); }

bool is_admissible(const OrderDomain& d) {
  std::unordered_set<Id> ids;
  std::unordered_set<Timestamp> times;
  for (const std::vector<Order>* side : {&d.bids, &d.asks}) {
    for (const Order& o : *side) {
      if (!ids.insert(o.id).second) return false;
      if (!times.insert(o.timestamp).second) return false;
    }
  }
  return true;
}

Quantity qty_bid(const TransactionSet& t, Id bid_id) {
  Quantity total = 0;
  for (const Transaction& x : t)
    if (x.bid_id == bid_id) total = checked_add(total, x.qty);
  return total;
}

Quantity qty_ask(const TransactionSet& t, Id ask_id) {
  Quantity total = 0;
  for (const Transaction& x : t)
    if (x.ask_id == ask_id) total = checked_add(total, x.qty);
  return total;
}

Quantity vol(const TransactionSet& t) {
  Quantity total = 0;
  for (const Transaction& x : t) total = checked_add(total, x.qty);
  return total;
}

namespace {

const Order* find_by_id(const std::vector<Order>& side, Id id) {
  for (const Order& o : side)
    if (o.id == id) return &o;
  return nullptr;
}

}  // namespace

bool transaction_valid(const Transaction& t, const OrderDomain& d) {
  if (!is_admissible(d)) throw PreconditionError("transaction_valid requires an admissible order-domain");
  const Order* b = find_by_id(d.bids, t.bid_id);
  const Order* a = find_by_id(d.asks, t.ask_id);
  if (b == nullptr || a == nullptr) return false;
  return tradable(*b, *a) && t.qty <= std::min(b->qty, a->qty);
}

bool is_matching(const TransactionSet& m, const OrderDomain& d) {
  if (!is_admissible(d)) throw PreconditionError("is_matching requires an admissible order-domain");

  std::unordered_map<Id, const Order*> bids, asks;
  for (const Order& o : d.bids) bids.emplace(o.id, &o);
  for (const Order& o : d.asks) asks.emplace(o.id, &o);

  std::unordered_map<Id, Quantity> bid_total, ask_total;
  for (const Transaction& t : m) {
    auto b = bids.find(t.bid_id);
    auto a = asks.find(t.ask_id);
    if (b == bids.end() || a == asks.end()) return false;
    if (!tradable(*b->second, *a->second)) return false;
    if (t.qty > std::min(b->second->qty, a->second->qty)) return false;
    bid_total[t.bid_id] = checked_add(bid_total[t.bid_id], t.qty);
    ask_total[t.ask_id] = checked_add(ask_total[t.ask_id], t.qty);
  }
  for (const auto& [id, total] : bid_total)
    if (total > bids.at(id)->qty) return false;
  for (const auto& [id, total] : ask_total)
    if (total > asks.at(id)->qty) return false;
  return true;
}

TransactionSet canonical_form(const TransactionSet& m) {
  std::map<std::pair<Id, Id>, Quantity> totals;
  for (const Transaction& t : m) {
    Quantity& q = totals[{t.bid_id, t.ask_id}];
    q = checked_add(q, t.qty);
  }
  TransactionSet out;
  out.reserve(totals.size());
  for (const auto& [pair, qty] : totals) out.emplace_back(pair.first, pair.second, qty);
  return out;
}

namespace {

std::vector<Order> traded_side(const TransactionSet& m, const std::vector<Order>& side,
                               bool bid_side) {
  std::unordered_map<Id, Quantity> totals;
  for (const Transaction& t : m) {
    Id id = bid_side ? t.bid_id : t.ask_id;
    totals[id] = checked_add(totals[id], t.qty);
  }
  std::unordered_set<Id> seen;
  for (const Order& o : side)
    if (!seen.insert(o.id).second)
      throw PreconditionError("traded orders require distinct ids in the order collection");
  for (const auto& [id, qty] : totals) {
    (void)qty;
    if (!seen.count(id))
      throw PreconditionError("matching references id " + std::to_string(id) +
                              " absent from the order collection");
  }
  std::vector<Order> out;
  for (const Order& o : side) {
    auto it = totals.find(o.id);
    if (it != totals.end()) out.emplace_back(o.id, o.timestamp, it->second, o.price);
  }
  return out;
}

}  // namespace

std::vector<Order> traded_bids(const TransactionSet& m, const std::vector<Order>& bids) {
  return traded_side(m, bids, true);
}

std::vector<Order> traded_asks(const TransactionSet& m, const std::vector<Order>& asks) {
  return traded_side(m, asks, false);
}

std::vector<Order> multiset_diff(const std::vector<Order>& s1, const std::vector<Order>& s2) {
  std::unordered_map<Id, const Order*> base;
  for (const Order& o : s1)
    if (!base.emplace(o.id, &o).second)
      throw PreconditionError("multiset_diff requires distinct ids within the first collection");

  std::unordered_map<Id, Quantity> subtract;
  for (const Order& o : s2) {
    auto it = base.find(o.id);
    if (it == base.end())
      throw PreconditionError("multiset_diff: id " + std::to_string(o.id) +
                              " not present in the first collection");
    const Order& b = *it->second;
    if (o.timestamp != b.timestamp || o.price != b.price)
      throw PreconditionError("multiset_diff: attribute mismatch for id " + std::to_string(o.id));
    if (o.qty > b.qty)
      throw PreconditionError("multiset_diff: over-subtraction for id " + std::to_string(o.id));
    if (!subtract.emplace(o.id, o.qty).second)
      throw PreconditionError("multiset_diff requires distinct ids within the second collection");
  }

  std::vector<Order> out;
  for (const Order& o : s1) {
    auto it = subtract.find(o.id);
    if (it == subtract.end()) {
      out.push_back(o);
    } else if (o.qty > it->second) {
      out.emplace_back(o.id, o.timestamp, o.qty - it->second, o.price);
    }
  }
  return out;
}

bool orders_equal(std::vector<Order> lhs, std::vector<Order> rhs) {
  if (lhs.size() != rhs.size()) return false;
  auto key = [](const Order& a, const Order& b) {
    return std::tie(a.id, a.timestamp, a.qty, a.price) < std::tie(b.id, b.timestamp, b.qty, b.price);
  };
  std::sort(lhs.begin(), lhs.end(), key);
  std::sort(rhs.begin(), rhs.end(), key);
  return lhs == rhs;
}

Price transaction_price(const Order& bid, const Order& ask) {
  if (!tradable(bid, ask)) throw PreconditionError("transaction_price requires a tradable pair");
  return ask.price;
}

Timestamp transaction_timestamp(const Order& bid, const Order& ask) {
  return std::max(bid.timestamp, ask.timestamp);
}

}  // namespace cda
