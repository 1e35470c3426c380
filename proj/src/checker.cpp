#include "cda/checker.hpp"

#include <chrono>

namespace cda {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Match: return "match";
    case Verdict::Mismatch: return "mismatch";
    case Verdict::InputError: return "input_error";
  }
  return "?";
}

namespace {

std::vector<PairDelta> pair_deltas(const TransactionSet& expected, const TransactionSet& actual) {
  // both inputs canonical, so a sorted merge on (bid_id, ask_id) works
  std::vector<PairDelta> out;
  std::size_t i = 0, j = 0;
  auto key = [](const Transaction& t) { return std::make_pair(t.bid_id, t.ask_id); };
  while (i < expected.size() || j < actual.size()) {
    if (j == actual.size() || (i < expected.size() && key(expected[i]) < key(actual[j]))) {
      out.push_back({expected[i].bid_id, expected[i].ask_id, expected[i].qty, 0});
      ++i;
    } else if (i == expected.size() || key(actual[j]) < key(expected[i])) {
      out.push_back({actual[j].bid_id, actual[j].ask_id, 0, actual[j].qty});
      ++j;
    } else {
      if (expected[i].qty != actual[j].qty)
        out.push_back({expected[i].bid_id, expected[i].ask_id, expected[i].qty, actual[j].qty});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

CheckReport check_logs(const OrderBook& book, const std::vector<TransactionSet>& trades,
                       const CheckOptions& opts) {
  if (trades.size() != book.size())
    throw PreconditionError("trades must align with the book, one transaction set per instruction");

  CheckReport report;
  auto start = std::chrono::steady_clock::now();
  std::size_t limit = std::min(book.size(), opts.max_steps);

  // structure is validated by the caller appropriately for its input path
  ReplayOptions ropts{.check_structure = false, .with_residents = false};
  try {
    run_book(
        book,
        [&](std::size_t i, const StepOutput& out) {
          if (i >= limit) return false;
          report.stats.instructions = i + 1;
          report.stats.total_volume = checked_add(report.stats.total_volume, vol(out.matching));
          TransactionSet expected = canonical_form(out.matching);
          TransactionSet actual = canonical_form(trades[i]);
          if (expected != actual) {
            report.verdict = Verdict::Mismatch;
            report.mismatches.push_back({i, book[i].order.timestamp, std::move(expected),
                                         std::move(actual), {}});
            StepMismatch& mm = report.mismatches.back();
            mm.diff = pair_deltas(mm.expected, mm.actual);
            if (!opts.all_mismatches) return false;
          }
          return true;
        },
        ropts);
  } catch (const IllegalInputError& e) {
    report.verdict = Verdict::InputError;
    report.error_step = e.step();
    report.error = e.reason();
  }

  report.stats.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace cda
