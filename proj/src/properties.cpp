#include "cda/properties.hpp"

#include <unordered_map>
#include <unordered_set>

namespace cda {

std::string PropertyReport::to_string() const {
  if (holds()) return "all properties hold";
  std::string out;
  for (const PropertyViolation& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.property + ": " + v.witness;
  }
  return out;
}

bool is_legal_input(const std::vector<Order>& bids, const std::vector<Order>& asks,
                    const Instruction& tau) {
  return !matchable(bids, asks) && is_admissible(absorb(bids, asks, tau));
}

StructureReport is_id_structured(const OrderBook& book) {
  std::unordered_set<Id> seen;
  for (std::size_t i = 0; i < book.size(); ++i) {
    const Instruction& ins = book[i];
    if (ins.command != Command::Del && seen.count(ins.order.id)) {
      bool reuse_after_del = i > 0 && book[i - 1].command == Command::Del &&
                             book[i - 1].order.id == ins.order.id;
      if (!reuse_after_del)
        return {false, i,
                "id " + std::to_string(ins.order.id) +
                    " already used and not immediately after its Del"};
    }
    seen.insert(ins.order.id);
  }
  return {};
}

StructureReport is_structured(const OrderBook& book) {
  for (std::size_t i = 1; i < book.size(); ++i) {
    if (book[i].order.timestamp <= book[i - 1].order.timestamp)
      return {false, i, "timestamps are not strictly increasing"};
  }
  return is_id_structured(book);
}

PropertyReport check_positive_spread(const std::vector<Order>& resident_bids,
                                     const std::vector<Order>& resident_asks) {
  PropertyReport r;
  if (resident_bids.empty() || resident_asks.empty()) return r;
  const Order* best_bid = &resident_bids.front();
  for (const Order& b : resident_bids)
    if (b.price > best_bid->price) best_bid = &b;
  const Order* best_ask = &resident_asks.front();
  for (const Order& a : resident_asks)
    if (a.price < best_ask->price) best_ask = &a;
  if (tradable(*best_bid, *best_ask))
    r.add("positive bid-ask spread",
          "resident bid " + std::to_string(best_bid->id) + " (price " +
              std::to_string(best_bid->price) + ") is tradable with resident ask " +
              std::to_string(best_ask->id) + " (price " + std::to_string(best_ask->price) + ")");
  return r;
}

namespace {

// one side of the priority check: every order more competitive than a traded
// order must itself be fully traded
template <typename MoreCompetitive>
void priority_side(const std::vector<Order>& side,
                   const std::unordered_map<Id, Quantity>& traded, const char* side_name,
                   MoreCompetitive more_competitive, PropertyReport& r) {
  for (const Order& worse : side) {
    auto t = traded.find(worse.id);
    if (t == traded.end() || t->second == 0) continue;
    for (const Order& better : side) {
      if (!more_competitive(better, worse)) continue;
      auto bt = traded.find(better.id);
      Quantity got = bt == traded.end() ? 0 : bt->second;
      if (got != better.qty)
        r.add("price-time priority",
              std::string(side_name) + " " + std::to_string(better.id) +
                  " is more competitive than traded " + std::to_string(worse.id) +
                  " but traded " + std::to_string(got) + " of " + std::to_string(better.qty));
    }
  }
}

std::unordered_map<Id, Quantity> totals_by(const TransactionSet& m, bool bid_side) {
  std::unordered_map<Id, Quantity> out;
  for (const Transaction& t : m) {
    Id id = bid_side ? t.bid_id : t.ask_id;
    out[id] = checked_add(out[id], t.qty);
  }
  return out;
}

bool ids_within_domain(const TransactionSet& m, const std::vector<Order>& bids,
                       const std::vector<Order>& asks) {
  std::unordered_set<Id> bid_ids, ask_ids;
  for (const Order& o : bids) bid_ids.insert(o.id);
  for (const Order& o : asks) ask_ids.insert(o.id);
  for (const Transaction& t : m)
    if (!bid_ids.count(t.bid_id) || !ask_ids.count(t.ask_id)) return false;
  return true;
}

}  // namespace

PropertyReport check_price_time_priority(const std::vector<Order>& absorbed_bids,
                                         const std::vector<Order>& absorbed_asks,
                                         const TransactionSet& m) {
  if (!ids_within_domain(m, absorbed_bids, absorbed_asks))
    throw PreconditionError("matching references ids outside the absorbed domain");
  PropertyReport r;
  priority_side(absorbed_asks, totals_by(m, false), "ask",
                [](const Order& x, const Order& y) { return more_competitive_ask(x, y); }, r);
  priority_side(absorbed_bids, totals_by(m, true), "bid",
                [](const Order& x, const Order& y) { return more_competitive_bid(x, y); }, r);
  return r;
}

PropertyReport check_conservation(const std::vector<Order>& absorbed_bids,
                                  const std::vector<Order>& absorbed_asks,
                                  const std::vector<Order>& resident_bids,
                                  const std::vector<Order>& resident_asks,
                                  const TransactionSet& m) {
  PropertyReport r;
  if (!ids_within_domain(m, absorbed_bids, absorbed_asks)) {
    r.add("conservation", "matching references an order absent from the absorbed domain");
    return r;
  }
  if (!is_matching(m, {absorbed_bids, absorbed_asks})) {
    r.add("conservation", "output is not a matching over the absorbed domain");
    return r;
  }
  if (!orders_equal(resident_bids, multiset_diff(absorbed_bids, traded_bids(m, absorbed_bids))))
    r.add("conservation", "resident bids differ from absorbed bids minus traded quantities");
  if (!orders_equal(resident_asks, multiset_diff(absorbed_asks, traded_asks(m, absorbed_asks))))
    r.add("conservation", "resident asks differ from absorbed asks minus traded quantities");
  return r;
}

PropertyReport check_step(const std::vector<Order>& bids, const std::vector<Order>& asks,
                          const Instruction& tau, const StepOutput& out) {
  if (!is_legal_input(bids, asks, tau))
    throw IllegalInputError("check_step requires a legal input");
  OrderDomain absorbed = absorb(bids, asks, tau);

  PropertyReport r = check_positive_spread(out.resident_bids, out.resident_asks);
  if (ids_within_domain(out.matching, absorbed.bids, absorbed.asks))
    r.merge(check_price_time_priority(absorbed.bids, absorbed.asks, out.matching));
  else
    r.add("price-time priority",
          "not evaluated: matching references an order absent from the absorbed domain");
  r.merge(check_conservation(absorbed.bids, absorbed.asks, out.resident_bids, out.resident_asks,
                             out.matching));
  return r;
}

}  // namespace cda
