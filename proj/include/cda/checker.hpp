#pragma once

#include "cda/engine.hpp"

namespace cda {

enum class Verdict { Match, Mismatch, InputError };

const char* to_string(Verdict v);

struct PairDelta {
  Id bid_id;
  Id ask_id;
  Quantity expected_qty;  // engine total for the pair
  Quantity actual_qty;    // trade-book total for the pair
};

struct StepMismatch {
  std::size_t step;
  Timestamp timestamp;     // the instruction's timestamp
  TransactionSet expected;  // canonical
  TransactionSet actual;    // canonical
  std::vector<PairDelta> diff;
};

struct CheckStats {
  std::size_t instructions = 0;
  Quantity total_volume = 0;
  double elapsed_seconds = 0.0;
};

struct CheckReport {
  Verdict verdict = Verdict::Match;
  std::vector<StepMismatch> mismatches;  // first only, unless all_mismatches
  std::size_t error_step = npos;
  std::string error;
  CheckStats stats;

  const StepMismatch* first_mismatch() const {
    return mismatches.empty() ? nullptr : &mismatches.front();
  }
};

struct CheckOptions {
  bool all_mismatches = false;   // keep walking with the engine's state as ground truth
  std::size_t max_steps = npos;  // compare at most this many steps
};

// Replays the book and compares canonical matchings step by step with the
// aligned trade sets. Stops at the first inequality unless all_mismatches is
// set. Illegal inputs become an InputError verdict, never a Mismatch.
// Precondition: trades has exactly one entry per instruction.
CheckReport check_logs(const OrderBook& book, const std::vector<TransactionSet>& trades,
                       const CheckOptions& opts = {});

}  // namespace cda
