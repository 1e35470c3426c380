#pragma once

#include "cda/engine.hpp"

namespace cda {

struct PropertyViolation {
  std::string property;
  std::string witness;
};

struct PropertyReport {
  std::vector<PropertyViolation> violations;

  bool holds() const { return violations.empty(); }
  void add(std::string property, std::string witness) {
    violations.push_back({std::move(property), std::move(witness)});
  }
  void merge(PropertyReport other) {
    for (auto& v : other.violations) violations.push_back(std::move(v));
  }
  std::string to_string() const;
};

// Residents plus one instruction form a legal input: the residents are not
// matchable and the absorbed domain is admissible.
bool is_legal_input(const std::vector<Order>& bids, const std::vector<Order>& asks,
                    const Instruction& tau);

struct StructureReport {
  bool ok = true;
  std::size_t index = npos;  // first offending instruction when !ok
  std::string reason;
};

// Timestamps strictly increase and every non-Del id is fresh, except reuse of
// an id immediately after a Del of the same id.
StructureReport is_structured(const OrderBook& book);
// The id condition alone; used for position-indexed books whose timestamp
// field carries priority rather than position.
StructureReport is_id_structured(const OrderBook& book);

// Holds iff the resident sides are not matchable.
PropertyReport check_positive_spread(const std::vector<Order>& resident_bids,
                                     const std::vector<Order>& resident_asks);

// Holds iff whenever a less competitive order trades, every more competitive
// order on its side of the absorbed domain is fully traded. Throws
// PreconditionError when the matching references ids outside the domain.
PropertyReport check_price_time_priority(const std::vector<Order>& absorbed_bids,
                                         const std::vector<Order>& absorbed_asks,
                                         const TransactionSet& m);

// Holds iff m is a matching over the absorbed domain and each resident side
// equals the absorbed side minus its traded part.
PropertyReport check_conservation(const std::vector<Order>& absorbed_bids,
                                  const std::vector<Order>& absorbed_asks,
                                  const std::vector<Order>& resident_bids,
                                  const std::vector<Order>& resident_asks,
                                  const TransactionSet& m);

// Conjunction of the three checks over one step. Precondition: the input is
// legal (throws IllegalInputError otherwise). All witnesses are aggregated.
PropertyReport check_step(const std::vector<Order>& bids, const std::vector<Order>& asks,
                          const Instruction& tau, const StepOutput& out);

}  // namespace cda
