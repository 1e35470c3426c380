#include "cda/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cda/checker.hpp"
#include "cda/logio.hpp"
#include "cda/oracle.hpp"
#include "cda/properties.hpp"

namespace cda {

namespace {

using nlohmann::json;

constexpr int kExitMatch = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitInputError = 2;
constexpr int kExitInternal = 3;

struct CheckCfg {
  bool raw = false;
  bool strict = false;
  bool lenient = false;
  bool all_mismatches = false;
  bool as_json = false;
  std::size_t max_steps = npos;
};

// everything needed to turn a step index back into source coordinates
struct SourceMap {
  std::vector<std::size_t> raw_row;  // empty for the raw path
  const std::vector<RawInstruction>* rows = nullptr;

  std::size_t line_of(std::size_t step) const {
    if (!rows) return 0;
    return raw_row.empty() ? (*rows)[step].line : (*rows)[raw_row[step]].line;
  }
  Timestamp timestamp_of(std::size_t step) const {
    if (!rows) return 0;
    return raw_row.empty() ? (*rows)[step].timestamp : (*rows)[raw_row[step]].timestamp;
  }
};

struct PairOutcome {
  int code = kExitMatch;
  std::string human;
  json report;
};

std::string render_transactions(const TransactionSet& ts) {
  if (ts.empty()) return "(none)";
  std::string out;
  for (const Transaction& t : ts) {
    if (!out.empty()) out += ", ";
    out += "(bid " + std::to_string(t.bid_id) + ", ask " + std::to_string(t.ask_id) + ") qty " +
           std::to_string(t.qty);
  }
  return out;
}

json transactions_to_json(const TransactionSet& ts) {
  json out = json::array();
  for (const Transaction& t : ts)
    out.push_back({{"bid_id", t.bid_id}, {"ask_id", t.ask_id}, {"qty", t.qty}});
  return out;
}

void print_diagnostics(std::ostream& os, const std::string& path,
                       const std::vector<Diagnostic>& diags, const char* severity) {
  for (const Diagnostic& d : diags) {
    os << path;
    if (d.line) os << ":" << d.line;
    os << ": " << severity << ": " << d.message << "\n";
  }
}

std::string diagnostics_string(const std::string& path, const std::vector<Diagnostic>& diags,
                               const char* severity) {
  std::ostringstream os;
  print_diagnostics(os, path, diags, severity);
  return os.str();
}

PairOutcome check_one(const std::string& orders_path, const std::string& trades_path,
                      const CheckCfg& cfg) {
  PairOutcome out;
  out.report = json{{"orders", orders_path}, {"trades", trades_path}};

  auto input_error = [&](std::string text) {
    out.code = kExitInputError;
    out.human = std::move(text);
    out.report["verdict"] = "input_error";
    out.report["error"] = {{"reason", out.human}};
    return out;
  };

  ParsedOrders orders = parse_order_book_file(orders_path, cfg.lenient);
  if (!orders.errors.empty())
    return input_error(diagnostics_string(orders_path, orders.errors, "error"));
  ParsedTrades trades = parse_trade_book_file(trades_path, cfg.lenient);
  if (!trades.errors.empty())
    return input_error(diagnostics_string(trades_path, trades.errors, "error"));

  OrderBook book;
  SourceMap src;
  src.rows = &orders.rows;
  GroupedTrades grouped;
  std::string warnings_text;

  if (cfg.raw) {
    RawToBookResult conv = book_from_raw(orders.rows);
    if (!conv.errors.empty())
      return input_error(diagnostics_string(orders_path, conv.errors, "error"));
    book = std::move(conv.book);
    StructureReport s = is_structured(book);
    if (!s.ok)
      return input_error(orders_path + ": error: instruction " + std::to_string(s.index) + ": " +
                         s.reason + "\n");
    grouped = group_trades_by_step(trades.rows, book);
  } else {
    PreprocessResult pre = preprocess(orders.rows, PreprocessOptions{cfg.strict});
    warnings_text = diagnostics_string(orders_path, pre.warnings, "warning");
    if (!pre.errors.empty())
      return input_error(warnings_text + diagnostics_string(orders_path, pre.errors, "error"));
    book = std::move(pre.book);
    src.raw_row = std::move(pre.raw_row);
    StructureReport s = is_id_structured(book);
    if (!s.ok)
      return input_error(orders_path + ": error: instruction " + std::to_string(s.index) + ": " +
                         s.reason + "\n");
    grouped = group_trades_by_step(trades.rows, pre.step_of_timestamp, book.size());
  }
  if (!grouped.errors.empty())
    return input_error(warnings_text + diagnostics_string(trades_path, grouped.errors, "error"));

  CheckReport report = check_logs(book, grouped.steps,
                                  CheckOptions{cfg.all_mismatches, cfg.max_steps});

  std::ostringstream os;
  os << warnings_text;
  os << orders_path << " vs " << trades_path << ": ";
  switch (report.verdict) {
    case Verdict::Match:
      out.code = kExitMatch;
      os << "MATCH\n";
      break;
    case Verdict::Mismatch: {
      out.code = kExitMismatch;
      const StepMismatch& mm = *report.first_mismatch();
      os << "MISMATCH at step " << mm.step << " (source line " << src.line_of(mm.step)
         << ", timestamp " << src.timestamp_of(mm.step) << ")\n";
      for (const StepMismatch& m : report.mismatches) {
        if (cfg.all_mismatches)
          os << "step " << m.step << " (timestamp " << src.timestamp_of(m.step) << ")\n";
        os << "  expected: " << render_transactions(m.expected) << "\n";
        os << "  actual:   " << render_transactions(m.actual) << "\n";
        for (const PairDelta& d : m.diff)
          os << "  diff:     (bid " << d.bid_id << ", ask " << d.ask_id << ") expected "
             << d.expected_qty << ", actual " << d.actual_qty << "\n";
      }
      if (cfg.all_mismatches && report.mismatches.size() > 1)
        os << "note: steps after the first mismatch are a divergence cascade; the engine's own "
              "state was used as ground truth\n";
      break;
    }
    case Verdict::InputError:
      out.code = kExitInputError;
      os << "INPUT ERROR at step " << report.error_step << " (source line "
         << src.line_of(report.error_step) << "): " << report.error << "\n";
      break;
  }
  os << "checked " << report.stats.instructions << " instructions, volume "
     << report.stats.total_volume << ", " << std::fixed << std::setprecision(3)
     << report.stats.elapsed_seconds * 1e3 << " ms\n";
  out.human = os.str();

  out.report["verdict"] = to_string(report.verdict);
  out.report["stats"] = {{"instructions", report.stats.instructions},
                         {"total_volume", report.stats.total_volume},
                         {"elapsed_seconds", report.stats.elapsed_seconds}};
  if (report.verdict == Verdict::Mismatch) {
    json mism = json::array();
    for (const StepMismatch& m : report.mismatches) {
      json diffs = json::array();
      for (const PairDelta& d : m.diff)
        diffs.push_back({{"bid_id", d.bid_id},
                         {"ask_id", d.ask_id},
                         {"expected_qty", d.expected_qty},
                         {"actual_qty", d.actual_qty}});
      mism.push_back({{"step", m.step},
                      {"timestamp", src.timestamp_of(m.step)},
                      {"source_line", src.line_of(m.step)},
                      {"expected", transactions_to_json(m.expected)},
                      {"actual", transactions_to_json(m.actual)},
                      {"diff", diffs}});
    }
    out.report["mismatches"] = mism;
  } else if (report.verdict == Verdict::InputError) {
    out.report["error"] = {{"step", report.error_step},
                           {"source_line", src.line_of(report.error_step)},
                           {"reason", report.error}};
  }
  return out;
}

int run_check(const std::vector<std::string>& orders, const std::vector<std::string>& trades,
              const CheckCfg& cfg) {
  if (orders.size() != trades.size()) {
    std::cerr << "error: --orders and --trades must be given the same number of times\n";
    return kExitInputError;
  }
  std::vector<PairOutcome> outcomes(orders.size());
  // one worker per instrument pair; each check is independent
  std::vector<std::thread> workers;
  workers.reserve(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) {
    workers.emplace_back([&, i] {
      try {
        outcomes[i] = check_one(orders[i], trades[i], cfg);
      } catch (const std::exception& e) {
        outcomes[i].code = kExitInternal;
        outcomes[i].human = std::string("internal error: ") + e.what() + "\n";
        outcomes[i].report = json{{"orders", orders[i]},
                                  {"trades", trades[i]},
                                  {"verdict", "internal_error"},
                                  {"error", {{"reason", e.what()}}}};
      }
    });
  }
  for (std::thread& w : workers) w.join();

  int code = kExitMatch;
  if (cfg.as_json) {
    if (outcomes.size() == 1) {
      std::cout << outcomes[0].report.dump(2) << "\n";
    } else {
      json all = json::array();
      for (const PairOutcome& o : outcomes) all.push_back(o.report);
      std::cout << all.dump(2) << "\n";
    }
  }
  for (const PairOutcome& o : outcomes) {
    if (!cfg.as_json) std::cout << o.human;
    code = std::max(code, o.code);
  }
  return code;
}

bool write_file(const std::string& path, const std::string& content, std::string& err) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    err = "cannot open " + path + " for writing";
    return false;
  }
  out << content;
  out.flush();
  if (!out) {
    err = "failed writing " + path;
    return false;
  }
  return true;
}

struct ReplayedBook {
  std::vector<RawInstruction> rows;
  OrderBook book;
  SourceMap src;
  std::vector<TransactionSet> canonical;  // per step
  StepOutput last;                        // final residents
};

// shared by replay/gen: load, optionally preprocess, run, canonicalize
int replay_file(const std::string& orders_path, bool raw, bool strict, ReplayedBook& out,
                std::string& error_text) {
  ParsedOrders orders = parse_order_book_file(orders_path, false);
  if (!orders.errors.empty()) {
    error_text = diagnostics_string(orders_path, orders.errors, "error");
    return kExitInputError;
  }

  out.rows = std::move(orders.rows);
  out.src.rows = &out.rows;

  if (raw) {
    RawToBookResult conv = book_from_raw(out.rows);
    if (!conv.errors.empty()) {
      error_text = diagnostics_string(orders_path, conv.errors, "error");
      return kExitInputError;
    }
    out.book = std::move(conv.book);
    StructureReport s = is_structured(out.book);
    if (!s.ok) {
      error_text = orders_path + ": error: instruction " + std::to_string(s.index) + ": " + s.reason + "\n";
      return kExitInputError;
    }
  } else {
    PreprocessResult pre = preprocess(out.rows, PreprocessOptions{strict});
    std::cerr << diagnostics_string(orders_path, pre.warnings, "warning");
    if (!pre.errors.empty()) {
      error_text = diagnostics_string(orders_path, pre.errors, "error");
      return kExitInputError;
    }
    out.book = std::move(pre.book);
    out.src.raw_row = std::move(pre.raw_row);
    StructureReport s = is_id_structured(out.book);
    if (!s.ok) {
      error_text = orders_path + ": error: instruction " + std::to_string(s.index) + ": " + s.reason + "\n";
      return kExitInputError;
    }
  }

  try {
    out.canonical.resize(out.book.size());
    Replay state;
    for (std::size_t i = 0; i < out.book.size(); ++i) {
      try {
        out.canonical[i] = canonical_form(state.step(out.book[i]));
      } catch (const IllegalInputError& e) {
        throw IllegalInputError(e.reason(), i);
      }
    }
    out.last.resident_bids = state.bids();
    out.last.resident_asks = state.asks();
  } catch (const IllegalInputError& e) {
    error_text = orders_path + ": error: step " + std::to_string(e.step()) + " (source line " +
                 std::to_string(out.src.line_of(e.step())) + "): " + e.reason() + "\n";
    return kExitInputError;
  }
  return kExitMatch;
}

std::vector<TradeRecord> trade_rows(const ReplayedBook& rb) {
  std::vector<TradeRecord> rows;
  for (std::size_t i = 0; i < rb.canonical.size(); ++i) {
    Timestamp ts = rb.src.raw_row.empty() ? rb.book[i].order.timestamp : rb.src.timestamp_of(i);
    for (const Transaction& t : rb.canonical[i])
      rows.push_back({ts, t.bid_id, t.ask_id, t.qty, 0});
  }
  return rows;
}

int run_replay(const std::string& orders_path, bool raw, bool strict,
               const std::string& emit_trades, bool emit_residents) {
  ReplayedBook rb;
  std::string err;
  int code = replay_file(orders_path, raw, strict, rb, err);
  if (code != kExitMatch) {
    std::cerr << err;
    return code;
  }

  Quantity volume = 0;
  for (const TransactionSet& ts : rb.canonical) volume = checked_add(volume, vol(ts));
  std::cout << "replayed " << rb.book.size() << " instructions, volume " << volume << ", "
            << rb.last.resident_bids.size() << " resident bids, " << rb.last.resident_asks.size()
            << " resident asks\n";

  if (!emit_trades.empty()) {
    std::string werr;
    if (!write_file(emit_trades, serialize_trade_book(trade_rows(rb)), werr)) {
      std::cerr << "error: " << werr << "\n";
      return kExitInputError;
    }
  }
  if (emit_residents) {
    auto dump_side = [](const char* name, const std::vector<Order>& side) {
      std::cout << name << " (id,timestamp,qty,price)\n";
      for (const Order& o : side)
        std::cout << "  " << o.id << "," << o.timestamp << "," << o.qty << "," << o.price << "\n";
    };
    dump_side("resident bids", rb.last.resident_bids);
    dump_side("resident asks", rb.last.resident_asks);
  }
  return kExitMatch;
}

int run_gen(const GenParams& params, const std::string& out_orders, const std::string& out_trades,
            const std::string& mutate, std::uint64_t mutate_seed) {
  OrderBook book = generate_book(params);

  std::vector<TransactionSet> steps(book.size());
  run_book(
      book,
      [&](std::size_t i, const StepOutput& out) {
        steps[i] = canonical_form(out.matching);
        return true;
      },
      ReplayOptions{.check_structure = true, .with_residents = false});

  if (!mutate.empty()) {
    auto kind = mutation_kind_from(mutate);
    if (!kind) {
      std::cerr << "error: unknown mutation kind '" << mutate << "' (drop, qty, swap, move)\n";
      return kExitInputError;
    }
    MutationResult mutated = mutate_trade_log(steps, *kind, mutate_seed);
    steps = std::move(mutated.steps);
    std::cout << "mutated step " << mutated.mutated_step << " (" << mutate << ")\n";
  }

  std::vector<TradeRecord> rows;
  for (std::size_t i = 0; i < steps.size(); ++i)
    for (const Transaction& t : steps[i])
      rows.push_back({book[i].order.timestamp, t.bid_id, t.ask_id, t.qty, 0});

  std::string err;
  if (!write_file(out_orders, serialize_order_book(to_raw(book)), err) ||
      !write_file(out_trades, serialize_trade_book(rows), err)) {
    std::cerr << "error: " << err << "\n";
    return kExitInputError;
  }
  std::cout << "wrote " << book.size() << " instructions to " << out_orders << " and "
            << rows.size() << " trades to " << out_trades << "\n";
  return kExitMatch;
}

int run_selfcheck(const GenParams& params) {
  OrderBook book = generate_book(params);

  std::vector<Order> alt_bids, alt_asks;
  std::vector<Order> prev_bids, prev_asks;
  std::size_t failures = 0;

  run_book(book, [&](std::size_t i, const StepOutput& engine_out) {
    StepOutput alt_out = alt_process(alt_bids, alt_asks, book[i]);

    PropertyReport engine_props = check_step(prev_bids, prev_asks, book[i], engine_out);
    PropertyReport alt_props = check_step(prev_bids, prev_asks, book[i], alt_out);
    if (!engine_props.holds()) {
      std::cerr << "step " << i << ": engine violates properties: " << engine_props.to_string()
                << "\n";
      ++failures;
    }
    if (!alt_props.holds()) {
      std::cerr << "step " << i << ": alternative process violates properties: "
                << alt_props.to_string() << "\n";
      ++failures;
    }
    if (!orders_equal(engine_out.resident_bids, alt_out.resident_bids) ||
        !orders_equal(engine_out.resident_asks, alt_out.resident_asks) ||
        canonical_form(engine_out.matching) != canonical_form(alt_out.matching)) {
      std::cerr << "step " << i << ": engines disagree\n";
      ++failures;
    }

    prev_bids = engine_out.resident_bids;
    prev_asks = engine_out.resident_asks;
    alt_bids = std::move(alt_out.resident_bids);
    alt_asks = std::move(alt_out.resident_asks);
    return failures == 0;
  });

  if (failures) {
    std::cerr << "selfcheck FAILED (seed " << params.seed << ", n " << params.num_instructions
              << ")\n";
    return kExitInternal;
  }
  std::cout << "selfcheck passed: " << book.size()
            << " instructions, uniqueness and all three step properties hold (seed " << params.seed
            << ")\n";
  return kExitMatch;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"continuous double auction engine and trade-log checker"};
  app.require_subcommand(1);

  // check
  auto* check = app.add_subcommand("check", "replay an order book and compare against a trade book");
  std::vector<std::string> orders_paths, trades_paths;
  CheckCfg cfg;
  check->add_option("--orders", orders_paths, "order book CSV (repeatable)")->required();
  check->add_option("--trades", trades_paths, "trade book CSV (repeatable)")->required();
  bool flag_raw = false, flag_preprocess = false;
  check->add_flag("--raw", flag_raw, "treat the order book as primitive BUY/SELL/DELETE rows");
  check->add_flag("--preprocess", flag_preprocess,
                  "rewrite exchange instruction types into primitives (default)");
  check->add_flag("--strict", cfg.strict, "escalate preprocessing warnings to errors");
  check->add_flag("--lenient", cfg.lenient, "collect all parse errors instead of stopping at the first");
  check->add_flag("--json", cfg.as_json, "machine-readable report");
  check->add_flag("--all-mismatches", cfg.all_mismatches,
                  "keep comparing past the first mismatch (divergence cascade)");
  check->add_option("--max-steps", cfg.max_steps, "compare at most this many steps");

  // replay
  auto* replay = app.add_subcommand("replay", "run the engine and emit its canonical trade book");
  std::string replay_orders, emit_trades;
  bool replay_raw = false, replay_pre = false, replay_strict = false, emit_residents = false;
  replay->add_option("--orders", replay_orders, "order book CSV")->required();
  replay->add_flag("--raw", replay_raw, "primitive rows, keep timestamps as-is");
  replay->add_flag("--preprocess", replay_pre, "preprocess exchange instruction types (default)");
  replay->add_flag("--strict", replay_strict, "escalate preprocessing warnings to errors");
  replay->add_option("--emit-trades", emit_trades, "write the canonical trade book here");
  replay->add_flag("--emit-residents", emit_residents, "print final resident orders");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random structured book and its trade book");
  GenParams gen_params;
  std::string out_orders, out_trades, mutate;
  std::uint64_t mutate_seed = 0;
  bool mutate_seed_set = false;
  gen->add_option("--seed", gen_params.seed, "PRNG seed")->required();
  gen->add_option("--n", gen_params.num_instructions, "number of instructions")->required();
  gen->add_option("--max-price", gen_params.max_price, "price ticks drawn from [1, max]");
  gen->add_option("--max-qty", gen_params.max_qty, "quantities drawn from [1, max]");
  gen->add_option("--del-prob", gen_params.del_probability, "probability of a Del instruction");
  gen->add_option("--buy-prob", gen_params.buy_probability, "probability of a Buy instruction");
  gen->add_option("--out-orders", out_orders, "order book CSV to write")->required();
  gen->add_option("--out-trades", out_trades, "trade book CSV to write")->required();
  gen->add_option("--mutate", mutate, "corrupt the trade book: drop, qty, swap, or move");
  gen->add_option("--mutate-seed", mutate_seed, "seed for the mutation position");

  // selfcheck
  auto* selfcheck =
      app.add_subcommand("selfcheck", "generate, replay with two engines, assert uniqueness");
  GenParams self_params;
  selfcheck->add_option("--seed", self_params.seed, "PRNG seed")->required();
  selfcheck->add_option("--n", self_params.num_instructions, "number of instructions")->required();
  selfcheck->add_option("--max-price", self_params.max_price, "price ticks drawn from [1, max]");
  selfcheck->add_option("--max-qty", self_params.max_qty, "quantities drawn from [1, max]");
  selfcheck->add_option("--del-prob", self_params.del_probability, "probability of a Del");
  selfcheck->add_option("--buy-prob", self_params.buy_probability, "probability of a Buy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitInputError;
  }

  try {
    if (check->parsed()) {
      if (flag_raw && flag_preprocess) {
        std::cerr << "error: --raw and --preprocess are mutually exclusive\n";
        return kExitInputError;
      }
      cfg.raw = flag_raw;
      return run_check(orders_paths, trades_paths, cfg);
    }
    if (replay->parsed()) {
      if (replay_raw && replay_pre) {
        std::cerr << "error: --raw and --preprocess are mutually exclusive\n";
        return kExitInputError;
      }
      return run_replay(replay_orders, replay_raw, replay_strict, emit_trades, emit_residents);
    }
    if (gen->parsed()) {
      mutate_seed_set = gen->count("--mutate-seed") > 0;
      return run_gen(gen_params, out_orders, out_trades, mutate,
                     mutate_seed_set ? mutate_seed : gen_params.seed + 1);
    }
    if (selfcheck->parsed()) return run_selfcheck(self_params);
  } catch (const IllegalInputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const SizeLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const OverflowError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace cda
