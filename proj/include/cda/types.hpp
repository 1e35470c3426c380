#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cda {

using Id = std::uint64_t;
using Timestamp = std::uint64_t;  // logical time, dimensionless
using Quantity = std::uint64_t;   // units of product
using Price = std::uint64_t;      // ticks

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

// Highest representable tick; reserved as the implicit limit of a market buy.
// The parser rejects explicit limit prices equal to it.
inline constexpr Price kMaxTick = std::numeric_limits<Price>::max();

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A documented precondition was broken by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A sum left the 64-bit range; we never wrap silently.
class OverflowError : public Error {
 public:
  OverflowError() : Error("quantity sum overflows 64 bits") {}
};

// Input beyond the exhaustive oracle's configured enumeration bounds.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

// An engine step was rejected: matchable residents, duplicate id, or
// duplicate timestamp. `step()` is the instruction index when known.
class IllegalInputError : public Error {
 public:
  explicit IllegalInputError(const std::string& reason, std::size_t step = npos)
      : Error(step == npos ? reason : "step " + std::to_string(step) + ": " + reason),
        reason_(reason),
        step_(step) {}

  const std::string& reason() const { return reason_; }
  std::size_t step() const { return step_; }

 private:
  std::string reason_;
  std::size_t step_;
};

inline Quantity checked_add(Quantity a, Quantity b) {
  Quantity out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw OverflowError();
  return out;
}

// fields in declaration order: id, timestamp, qty, price
struct Order {
  Id id;
  Timestamp timestamp;
  Quantity qty;  // always > 0
  Price price;

  Order(Id id_, Timestamp timestamp_, Quantity qty_, Price price_)
      : id(id_), timestamp(timestamp_), qty(qty_), price(price_) {
    if (qty == 0) throw PreconditionError("order quantity must be positive");
  }

  friend bool operator==(const Order&, const Order&) = default;
};

enum class Command { Buy, Sell, Del };

const char* to_string(Command c);

struct Instruction {
  Command command;
  Order order;  // for Del only the id (and, within books, the timestamp) matter

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

inline Instruction make_del(Id id, Timestamp timestamp) {
  return Instruction{Command::Del, Order(id, timestamp, 1, 0)};
}

struct Transaction {
  Id bid_id;
  Id ask_id;
  Quantity qty;  // always > 0

  Transaction(Id bid_id_, Id ask_id_, Quantity qty_)
      : bid_id(bid_id_), ask_id(ask_id_), qty(qty_) {
    if (qty == 0) throw PreconditionError("transaction quantity must be positive");
  }

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

// duplicates of a (bid_id, ask_id) pair are permitted
using TransactionSet = std::vector<Transaction>;

using OrderBook = std::vector<Instruction>;

struct OrderDomain {
  std::vector<Order> bids;
  std::vector<Order> asks;
};

}  // namespace cda
