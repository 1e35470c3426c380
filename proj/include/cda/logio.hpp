#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>

#include "cda/types.hpp"

namespace cda {

// Order-book CSV: kind,id,timestamp,qty,price[,extra]
//   BUY,1,100,5,10            limit orders (also SELL)
//   DELETE,1,101,,            qty and price stay empty
//   MARKET_SELL,2,102,3,      no limit price (also MARKET_BUY)
//   IOC_BUY,3,103,4,9         trades on arrival, never rests (also IOC_SELL)
//   UPDATE_BUY,1,104,3,10,2   extra = untraded qty, optional (also UPDATE_SELL)
//   STOP_BUY,4,105,2,12,110   extra = trigger timestamp, required (also STOP_SELL)
// Trade-book CSV: step_timestamp,bid_id,ask_id,qty
// UTF-8, LF line endings, optional header (detected by a non-numeric second
// field), no quoting.

enum class RawKind {
  Buy,
  Sell,
  Delete,
  UpdateBuy,
  UpdateSell,
  MarketBuy,
  MarketSell,
  IocBuy,
  IocSell,
  StopBuy,
  StopSell,
};

const char* to_string(RawKind kind);

struct RawInstruction {
  RawKind kind;
  Id id = 0;
  Timestamp timestamp = 0;
  std::optional<Quantity> qty;               // absent for DELETE
  std::optional<Price> price;                // absent for DELETE and MARKET_*
  std::optional<Timestamp> trigger_timestamp;  // STOP_* only
  std::optional<Quantity> untraded_qty;        // UPDATE_* only, optional
  std::size_t line = 0;                        // source line for diagnostics

  friend bool operator==(const RawInstruction& a, const RawInstruction& b) {
    return a.kind == b.kind && a.id == b.id && a.timestamp == b.timestamp && a.qty == b.qty &&
           a.price == b.price && a.trigger_timestamp == b.trigger_timestamp &&
           a.untraded_qty == b.untraded_qty;  // line intentionally ignored
  }
};

struct TradeRecord {
  Timestamp step_timestamp = 0;  // timestamp of the triggering instruction
  Id bid_id = 0;
  Id ask_id = 0;
  Quantity qty = 0;
  std::size_t line = 0;

  friend bool operator==(const TradeRecord& a, const TradeRecord& b) {
    return a.step_timestamp == b.step_timestamp && a.bid_id == b.bid_id &&
           a.ask_id == b.ask_id && a.qty == b.qty;
  }
};

struct Diagnostic {
  std::size_t line = 0;
  std::string message;
};

struct ParsedOrders {
  std::vector<RawInstruction> rows;
  std::vector<Diagnostic> errors;
};

struct ParsedTrades {
  std::vector<TradeRecord> rows;
  std::vector<Diagnostic> errors;
};

// By default the first bad line aborts the parse; lenient mode collects every
// diagnostic and keeps the good rows.
ParsedOrders parse_order_book(std::istream& in, bool lenient = false);
ParsedOrders parse_order_book_file(const std::string& path, bool lenient = false);
ParsedTrades parse_trade_book(std::istream& in, bool lenient = false);
ParsedTrades parse_trade_book_file(const std::string& path, bool lenient = false);

std::string serialize_order_book(const std::vector<RawInstruction>& rows);
std::string serialize_trade_book(const std::vector<TradeRecord>& rows);

// Primitive instructions as raw rows (Buy/Sell/Del only).
std::vector<RawInstruction> to_raw(const OrderBook& book);

struct RawToBookResult {
  OrderBook book;
  std::vector<Diagnostic> errors;
};

// Interprets rows that are already primitive (BUY/SELL/DELETE), keeping their
// timestamps; anything else is an error.
RawToBookResult book_from_raw(const std::vector<RawInstruction>& rows);

struct PreprocessOptions {
  bool strict = false;  // escalate never-issued UPDATE/DELETE ids to errors
};

struct PreprocessResult {
  OrderBook book;                     // primitive instructions, timestamps = positions
                                      // (1-based) except retained priorities
  std::vector<std::size_t> raw_row;   // final step -> raw row index
  std::unordered_map<Timestamp, std::size_t> step_of_timestamp;  // raw ts -> trade step
  std::vector<Diagnostic> warnings;
  std::vector<Diagnostic> errors;
};

// Rewrites exchange instruction types into the three primitives:
//   UPDATE  -> Del; Buy/Sell (retaining the original priority timestamp when
//              the price is unchanged and the quantity decreased)
//   MARKET  -> price 0 (sell) or the maximum tick (buy)
//   IOC     -> Buy/Sell; Del
//   STOP    -> repositioned after the instruction bearing its trigger timestamp
// then reindexes timestamps to 1..n by final position. Output grows by at
// most a factor of two.
PreprocessResult preprocess(const std::vector<RawInstruction>& raw,
                            const PreprocessOptions& opts = {});

struct GroupedTrades {
  std::vector<TransactionSet> steps;  // aligned with the book, empty set when no trades
  std::vector<Diagnostic> errors;     // orphan step timestamps
};

GroupedTrades group_trades_by_step(const std::vector<TradeRecord>& records,
                                   const OrderBook& book);
GroupedTrades group_trades_by_step(const std::vector<TradeRecord>& records,
                                   const std::unordered_map<Timestamp, std::size_t>& step_of_timestamp,
                                   std::size_t num_steps);

}  // namespace cda
