#include "cda/engine.hpp"

#include <algorithm>

#include "cda/properties.hpp"

namespace cda {

OrderDomain absorb(const std::vector<Order>& bids, const std::vector<Order>& asks,
                   const Instruction& tau) {
  OrderDomain out{bids, asks};
  switch (tau.command) {
    case Command::Del: {
      auto drop = [id = tau.order.id](const Order& o) { return o.id == id; };
      std::erase_if(out.bids, drop);
      std::erase_if(out.asks, drop);
      break;
    }
    case Command::Buy:
      out.bids.push_back(tau.order);
      break;
    case Command::Sell:
      out.asks.push_back(tau.order);
      break;
  }
  return out;
}

Replay::Replay(const std::vector<Order>& bids, const std::vector<Order>& asks) {
  for (const Order& o : bids) {
    require_fresh(o);
    insert_resident(o, true);
  }
  for (const Order& o : asks) {
    require_fresh(o);
    insert_resident(o, false);
  }
}

void Replay::require_fresh(const Order& o) const {
  if (by_id_.count(o.id))
    throw IllegalInputError("duplicate id " + std::to_string(o.id));
  if (timestamps_.count(o.timestamp))
    throw IllegalInputError("duplicate timestamp " + std::to_string(o.timestamp));
}

void Replay::require_positive_spread() const {
  if (!bids_.empty() && !asks_.empty() && bids_.begin()->price >= asks_.begin()->price)
    throw IllegalInputError("resident orders are matchable (bid " +
                            std::to_string(bids_.begin()->id) + ", ask " +
                            std::to_string(asks_.begin()->id) + ")");
}

void Replay::insert_resident(const Order& o, bool is_bid) {
  bool inserted = is_bid ? bids_.insert(o).second : asks_.insert(o).second;
  if (!inserted)
    throw Error("internal: competitiveness tie among residents (id " + std::to_string(o.id) + ")");
  by_id_.emplace(o.id, Locator{is_bid, o.timestamp, o.price, o.qty});
  timestamps_.insert(o.timestamp);
}

void Replay::remove_id(Id id) {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return;
  const Locator& loc = it->second;
  Order key(id, loc.timestamp, 1, loc.price);
  if (loc.is_bid)
    bids_.erase(bids_.find(key));
  else
    asks_.erase(asks_.find(key));
  timestamps_.erase(loc.timestamp);
  by_id_.erase(it);
}

Quantity Replay::resident_qty(Id id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? 0 : it->second.qty;
}

template <typename Set>
TransactionSet Replay::match_incoming(Order incoming, Set& opposite, bool incoming_is_bid) {
  TransactionSet m;
  Quantity remaining = incoming.qty;
  while (!opposite.empty()) {
    const Order& best = *opposite.begin();
    bool ok = incoming_is_bid ? tradable(incoming, best) : tradable(best, incoming);
    if (!ok) break;
    if (best.qty <= remaining) {
      // best is consumed whole; when the quantities tie the incoming order
      // leaves the system too
      if (incoming_is_bid)
        m.emplace_back(incoming.id, best.id, best.qty);
      else
        m.emplace_back(best.id, incoming.id, best.qty);
      remaining -= best.qty;
      Order gone = best;
      opposite.erase(opposite.begin());
      timestamps_.erase(gone.timestamp);
      by_id_.erase(gone.id);
      if (remaining == 0) return m;
    } else {
      // best survives with reduced quantity; the incoming order is exhausted
      if (incoming_is_bid)
        m.emplace_back(incoming.id, best.id, remaining);
      else
        m.emplace_back(best.id, incoming.id, remaining);
      auto node = opposite.extract(opposite.begin());
      node.value().qty -= remaining;
      by_id_.at(node.value().id).qty = node.value().qty;
      opposite.insert(std::move(node));
      return m;
    }
  }
  incoming.qty = remaining;
  insert_resident(incoming, incoming_is_bid);
  return m;
}

TransactionSet Replay::step(const Instruction& tau) {
  require_positive_spread();
  switch (tau.command) {
    case Command::Del:
      remove_id(tau.order.id);
      return {};
    case Command::Buy:
      require_fresh(tau.order);
      return match_incoming(tau.order, asks_, true);
    case Command::Sell:
      require_fresh(tau.order);
      return match_incoming(tau.order, bids_, false);
  }
  throw Error("internal: unknown command");
}

namespace {

StepOutput step_via_replay(const std::vector<Order>& bids, const std::vector<Order>& asks,
                           const Instruction& tau) {
  Replay state(bids, asks);
  TransactionSet m = state.step(tau);
  return StepOutput{state.bids(), state.asks(), std::move(m)};
}

}  // namespace

StepOutput match_ask(const std::vector<Order>& bids, const std::vector<Order>& asks,
                     const Order& incoming_ask) {
  return step_via_replay(bids, asks, Instruction{Command::Sell, incoming_ask});
}

StepOutput match_bid(const std::vector<Order>& bids, const std::vector<Order>& asks,
                     const Order& incoming_bid) {
  return step_via_replay(bids, asks, Instruction{Command::Buy, incoming_bid});
}

StepOutput del_order(const std::vector<Order>& bids, const std::vector<Order>& asks, Id id) {
  if (!is_admissible({bids, asks}))
    throw IllegalInputError("order-domain is inadmissible (duplicate id or timestamp)");
  if (matchable(bids, asks)) throw IllegalInputError("resident orders are matchable");
  Replay state(bids, asks);
  TransactionSet m = state.step(make_del(id, 0));
  return StepOutput{state.bids(), state.asks(), std::move(m)};
}

StepOutput process_instruction(const std::vector<Order>& bids, const std::vector<Order>& asks,
                               const Instruction& tau) {
  switch (tau.command) {
    case Command::Buy:
      return match_bid(bids, asks, tau.order);
    case Command::Sell:
      return match_ask(bids, asks, tau.order);
    case Command::Del: {
      // legal inputs only require the absorbed domain to be admissible
      if (matchable(bids, asks)) throw IllegalInputError("resident orders are matchable");
      OrderDomain after = absorb(bids, asks, tau);
      if (!is_admissible(after))
        throw IllegalInputError("absorbed order-domain is inadmissible (duplicate id or timestamp)");
      std::sort(after.bids.begin(), after.bids.end(), MoreCompetitiveBid{});
      std::sort(after.asks.begin(), after.asks.end(), MoreCompetitiveAsk{});
      return StepOutput{std::move(after.bids), std::move(after.asks), {}};
    }
  }
  throw Error("internal: unknown command");
}

StepOutput iterated(const OrderBook& book, std::size_t k, const ReplayOptions& opts) {
  if (k == 0 || k > book.size()) return {};
  if (opts.check_structure) {
    StructureReport s = is_structured(book);
    if (!s.ok) throw IllegalInputError("book is not structured: " + s.reason, s.index);
  }
  StepOutput cur;
  for (std::size_t i = 0; i < k; ++i) {
    try {
      cur = process_instruction(cur.resident_bids, cur.resident_asks, book[i]);
    } catch (const IllegalInputError& e) {
      throw IllegalInputError(e.reason(), i);
    }
  }
  return cur;
}

void run_book(const OrderBook& book, const StepVisitor& visit, const ReplayOptions& opts) {
  if (opts.check_structure) {
    StructureReport s = is_structured(book);
    if (!s.ok) throw IllegalInputError("book is not structured: " + s.reason, s.index);
  }
  Replay state;
  StepOutput out;
  for (std::size_t i = 0; i < book.size(); ++i) {
    try {
      out.matching = state.step(book[i]);
    } catch (const IllegalInputError& e) {
      throw IllegalInputError(e.reason(), i);
    }
    if (opts.with_residents) {
      state.snapshot_bids(out.resident_bids);
      state.snapshot_asks(out.resident_asks);
    } else {
      out.resident_bids.clear();
      out.resident_asks.clear();
    }
    if (!visit(i, out)) return;
  }
}

std::vector<StepOutput> run_book(const OrderBook& book, const ReplayOptions& opts) {
  std::vector<StepOutput> steps;
  steps.reserve(book.size());
  run_book(
      book,
      [&](std::size_t, const StepOutput& out) {
        steps.push_back(out);
        return true;
      },
      opts);
  return steps;
}

}  // namespace cda
