#pragma once

#include <optional>
#include <string_view>

#include "cda/properties.hpp"

namespace cda {

// Bounds under which exhaustive enumeration stays tractable; beyond them the
// oracle refuses rather than degrades.
struct OracleLimits {
  std::size_t max_orders_per_side = 6;
  Quantity max_qty = 10;
  std::size_t max_states = 2'000'000;
};

// Maximum of vol(M') over all matchings M' over d, by exhaustive enumeration
// of per-pair quantities with memoization on residual capacities. Trusted
// reference: no greedy shortcut. Throws SizeLimitError beyond the limits.
Quantity max_matching_volume(const OrderDomain& d, const OracleLimits& limits = {});

// A deliberately different process for uniqueness testing: unsorted sides,
// a full linear scan per match for the most competitive tradable opposite
// order, transactions recorded newest-first. Same legal-input contract as
// process_instruction.
StepOutput alt_process(std::vector<Order> bids, std::vector<Order> asks, const Instruction& tau);

struct GenParams {
  std::uint64_t seed = 1;
  std::size_t num_instructions = 0;
  Price max_price = 50;
  Quantity max_qty = 100;
  double del_probability = 0.15;
  double buy_probability = 0.425;  // remainder after del and buy is sell
};

// Deterministic in the seed (mt19937_64, modulo draws; see README). Output is
// structured by construction: timestamps are index + 1, ids are fresh except
// occasional reuse immediately after a Del of the same id.
OrderBook generate_book(const GenParams& params);

enum class MutationKind { Drop, Qty, Swap, Move };

const char* to_string(MutationKind kind);
std::optional<MutationKind> mutation_kind_from(std::string_view name);

struct MutationResult {
  std::vector<TransactionSet> steps;
  std::size_t mutated_step = npos;  // first step whose matching changed
};

// Applies exactly one mutation of the given kind at a seed-chosen position
// where it provably changes some step's canonical form. Throws
// PreconditionError when no such position exists.
MutationResult mutate_trade_log(const std::vector<TransactionSet>& steps, MutationKind kind,
                                std::uint64_t seed);

}  // namespace cda
