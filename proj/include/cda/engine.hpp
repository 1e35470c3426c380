#pragma once

#include <functional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "cda/core.hpp"

namespace cda {

struct StepOutput {
  std::vector<Order> resident_bids;  // competitiveness order, best first
  std::vector<Order> resident_asks;
  TransactionSet matching;
};

// Effective order-domain after one instruction: Del filters the id from both
// sides, Buy/Sell joins its side.
OrderDomain absorb(const std::vector<Order>& bids, const std::vector<Order>& asks,
                   const Instruction& tau);

// One step of the reference process. The incoming order repeatedly trades
// against the most competitive tradable resident on the opposite side;
// whatever quantity survives becomes resident. Preconditions: the combined
// domain is admissible and the residents alone are not matchable; violations
// throw IllegalInputError.
StepOutput match_ask(const std::vector<Order>& bids, const std::vector<Order>& asks,
                     const Order& incoming_ask);
StepOutput match_bid(const std::vector<Order>& bids, const std::vector<Order>& asks,
                     const Order& incoming_bid);
StepOutput del_order(const std::vector<Order>& bids, const std::vector<Order>& asks, Id id);

// Dispatch on the instruction's command. Precondition: (bids, asks, tau) is a
// legal input.
StepOutput process_instruction(const std::vector<Order>& bids, const std::vector<Order>& asks,
                               const Instruction& tau);

struct ReplayOptions {
  bool check_structure = true;  // reject non-structured books up front
  bool with_residents = true;   // fill resident snapshots in step outputs
};

// Output of the process at time k when iterated over the book: k = 0 or
// k > length yields an empty output, otherwise the output of step k-1.
// Folds the pure step function; run_book below is the single-pass variant.
StepOutput iterated(const OrderBook& book, std::size_t k, const ReplayOptions& opts = {});

// Visits every step's output in one pass; return false from the visitor to
// stop early. Illegal inputs throw IllegalInputError carrying the step index.
using StepVisitor = std::function<bool(std::size_t, const StepOutput&)>;
void run_book(const OrderBook& book, const StepVisitor& visit, const ReplayOptions& opts = {});
std::vector<StepOutput> run_book(const OrderBook& book, const ReplayOptions& opts = {});

// Incremental replayer. Resident sides are kept ordered by competitiveness,
// so the best order is O(1) and inserts are O(log n); observable behavior is
// identical to the pure step functions.
class Replay {
 public:
  Replay() = default;
  // Seeds resident state; throws IllegalInputError on duplicate id/timestamp.
  Replay(const std::vector<Order>& bids, const std::vector<Order>& asks);

  // Processes one instruction and returns the transactions it generated.
  TransactionSet step(const Instruction& tau);

  std::vector<Order> bids() const { return {bids_.begin(), bids_.end()}; }
  std::vector<Order> asks() const { return {asks_.begin(), asks_.end()}; }
  void snapshot_bids(std::vector<Order>& out) const { out.assign(bids_.begin(), bids_.end()); }
  void snapshot_asks(std::vector<Order>& out) const { out.assign(asks_.begin(), asks_.end()); }

  bool has_resident(Id id) const { return by_id_.count(id) != 0; }
  // Resident quantity of an id, 0 when absent.
  Quantity resident_qty(Id id) const;

  std::size_t size() const { return by_id_.size(); }

 private:
  struct Locator {
    bool is_bid;
    Timestamp timestamp;
    Price price;
    Quantity qty;
  };

  void insert_resident(const Order& o, bool is_bid);
  void remove_id(Id id);
  void require_fresh(const Order& o) const;
  void require_positive_spread() const;
  template <typename Set>
  TransactionSet match_incoming(Order incoming, Set& opposite, bool incoming_is_bid);

  std::set<Order, MoreCompetitiveBid> bids_;
  std::set<Order, MoreCompetitiveAsk> asks_;
  std::unordered_map<Id, Locator> by_id_;
  std::unordered_set<Timestamp> timestamps_;
};

}  // namespace cda
