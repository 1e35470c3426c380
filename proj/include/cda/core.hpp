#pragma once

#include "cda/types.hpp"

namespace cda {

// Price-time priority: better price wins, earlier timestamp breaks price ties.
bool more_competitive_bid(const Order& b1, const Order& b2);
bool more_competitive_ask(const Order& a1, const Order& a2);

// Comparators for ordered containers (most competitive first). Two distinct
// orders compare equivalent only when both price and timestamp coincide,
// which admissibility rules out.
struct MoreCompetitiveBid {
  bool operator()(const Order& x, const Order& y) const {
    if (x.price != y.price) return x.price > y.price;
    return x.timestamp < y.timestamp;
  }
};

struct MoreCompetitiveAsk {
  bool operator()(const Order& x, const Order& y) const {
    if (x.price != y.price) return x.price < y.price;
    return x.timestamp < y.timestamp;
  }
};

bool tradable(const Order& bid, const Order& ask);

// True iff some bid-ask pair is tradable; computed as
// max bid price >= min ask price.
bool matchable(const std::vector<Order>& bids, const std::vector<Order>& asks);
bool matchable(const OrderDomain& d);

// Distinct ids and distinct timestamps across bids and asks together.
bool is_admissible(const OrderDomain& d);

Quantity qty_bid(const TransactionSet& t, Id bid_id);
Quantity qty_ask(const TransactionSet& t, Id ask_id);
Quantity vol(const TransactionSet& t);

bool transaction_valid(const Transaction& t, const OrderDomain& d);

// Every transaction valid over d, and per-order traded totals within each
// order's quantity.
bool is_matching(const TransactionSet& m, const OrderDomain& d);

// At most one transaction per (bid_id, ask_id) pair, pair totals preserved,
// emitted in ascending (bid_id, ask_id) order so canonical forms compare
// structurally.
TransactionSet canonical_form(const TransactionSet& m);

// Participating bids with quantity replaced by their traded total in m.
// Requires distinct ids in `bids` and every bid id of m present there.
std::vector<Order> traded_bids(const TransactionSet& m, const std::vector<Order>& bids);
std::vector<Order> traded_asks(const TransactionSet& m, const std::vector<Order>& asks);

// Multiset difference with quantity as multiplicity. Every s2 order must
// match an s1 order's id/timestamp/price with qty <= the s1 quantity;
// fully consumed orders are dropped.
std::vector<Order> multiset_diff(const std::vector<Order>& s1, const std::vector<Order>& s2);

// Equality of order collections as sets of (id, timestamp, qty, price) tuples.
bool orders_equal(std::vector<Order> lhs, std::vector<Order> rhs);

// Conventional attributes of a trade between a tradable pair; a convenience
// only, never part of comparisons.
Price transaction_price(const Order& bid, const Order& ask);
Timestamp transaction_timestamp(const Order& bid, const Order& ask);

}  // namespace cda
