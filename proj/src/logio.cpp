#include "cda/logio.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "cda/engine.hpp"

namespace cda {

const char* to_string(RawKind kind) {
  switch (kind) {
    case RawKind::Buy: return "BUY";
    case RawKind::Sell: return "SELL";
    case RawKind::Delete: return "DELETE";
    case RawKind::UpdateBuy: return "UPDATE_BUY";
    case RawKind::UpdateSell: return "UPDATE_SELL";
    case RawKind::MarketBuy: return "MARKET_BUY";
    case RawKind::MarketSell: return "MARKET_SELL";
    case RawKind::IocBuy: return "IOC_BUY";
    case RawKind::IocSell: return "IOC_SELL";
    case RawKind::StopBuy: return "STOP_BUY";
    case RawKind::StopSell: return "STOP_SELL";
  }
  return "?";
}

namespace {

bool parse_u64(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

std::optional<RawKind> kind_from(std::string_view name) {
  for (RawKind k : {RawKind::Buy, RawKind::Sell, RawKind::Delete, RawKind::UpdateBuy,
                    RawKind::UpdateSell, RawKind::MarketBuy, RawKind::MarketSell, RawKind::IocBuy,
                    RawKind::IocSell, RawKind::StopBuy, RawKind::StopSell})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

bool is_update(RawKind k) { return k == RawKind::UpdateBuy || k == RawKind::UpdateSell; }
bool is_market(RawKind k) { return k == RawKind::MarketBuy || k == RawKind::MarketSell; }
bool is_stop(RawKind k) { return k == RawKind::StopBuy || k == RawKind::StopSell; }

bool buy_side(RawKind k) {
  return k == RawKind::Buy || k == RawKind::UpdateBuy || k == RawKind::MarketBuy ||
         k == RawKind::IocBuy || k == RawKind::StopBuy;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool looks_like_header(std::string_view line) {
  auto fields = split_csv(strip_cr(line));
  if (fields.size() < 2) return false;
  std::uint64_t ignored = 0;
  return !parse_u64(fields[1], ignored);
}

std::optional<RawInstruction> parse_order_row(std::string_view line, std::size_t line_no,
                                              std::vector<Diagnostic>& errors) {
  auto fail = [&](std::string msg) -> std::optional<RawInstruction> {
    errors.push_back({line_no, std::move(msg)});
    return std::nullopt;
  };

  auto fields = split_csv(line);
  if (fields.size() != 5 && fields.size() != 6)
    return fail("expected kind,id,timestamp,qty,price[,extra], got " +
                std::to_string(fields.size()) + " fields");

  RawInstruction row;
  row.line = line_no;
  auto kind = kind_from(fields[0]);
  if (!kind) {
    if (fields[0].substr(0, 7) == "ICEBERG")
      return fail("iceberg orders are not supported");
    return fail("unknown kind '" + std::string(fields[0]) + "'");
  }
  row.kind = *kind;

  if (!parse_u64(fields[1], row.id)) return fail("id must be a non-negative integer");
  if (!parse_u64(fields[2], row.timestamp)) return fail("timestamp must be a non-negative integer");

  bool want_qty = row.kind != RawKind::Delete;
  if (want_qty) {
    Quantity q = 0;
    if (!parse_u64(fields[3], q)) return fail("qty must be a non-negative integer");
    if (q == 0) return fail("qty must be positive");
    row.qty = q;
  } else if (!fields[3].empty()) {
    return fail("DELETE must leave qty empty");
  }

  bool want_price = row.kind != RawKind::Delete && !is_market(row.kind);
  if (want_price) {
    Price p = 0;
    if (!parse_u64(fields[4], p)) return fail("price must be a non-negative integer");
    if (p == kMaxTick) return fail("price equals the reserved maximum tick");
    row.price = p;
  } else if (!fields[4].empty()) {
    return fail(std::string(to_string(row.kind)) + " must leave price empty");
  }

  std::string_view extra = fields.size() == 6 ? fields[5] : std::string_view{};
  if (is_stop(row.kind)) {
    Timestamp t = 0;
    if (!parse_u64(extra, t)) return fail("STOP_* requires a trigger timestamp in the extra field");
    row.trigger_timestamp = t;
  } else if (is_update(row.kind)) {
    if (!extra.empty()) {
      Quantity u = 0;
      if (!parse_u64(extra, u)) return fail("untraded qty must be a non-negative integer");
      row.untraded_qty = u;
    }
  } else if (!extra.empty()) {
    return fail(std::string(to_string(row.kind)) + " takes no extra field");
  }
  return row;
}

}  // namespace

ParsedOrders parse_order_book(std::istream& in, bool lenient) {
  ParsedOrders out;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = strip_cr(line);
    if (view.empty()) continue;
    if (first && looks_like_header(view)) {
      first = false;
      continue;
    }
    first = false;
    auto row = parse_order_row(view, line_no, out.errors);
    if (row) out.rows.push_back(*row);
    if (!out.errors.empty() && !lenient) return out;
  }
  return out;
}

ParsedOrders parse_order_book_file(const std::string& path, bool lenient) {
  std::ifstream in(path);
  if (!in) return {{}, {{0, "cannot open " + path}}};
  return parse_order_book(in, lenient);
}

ParsedTrades parse_trade_book(std::istream& in, bool lenient) {
  ParsedTrades out;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = strip_cr(line);
    if (view.empty()) continue;
    if (first && looks_like_header(view)) {
      first = false;
      continue;
    }
    first = false;

    auto fields = split_csv(view);
    auto fail = [&](std::string msg) { out.errors.push_back({line_no, std::move(msg)}); };
    if (fields.size() != 4) {
      fail("expected step_timestamp,bid_id,ask_id,qty");
    } else {
      TradeRecord rec;
      rec.line = line_no;
      if (!parse_u64(fields[0], rec.step_timestamp))
        fail("step_timestamp must be a non-negative integer");
      else if (!parse_u64(fields[1], rec.bid_id))
        fail("bid_id must be a non-negative integer");
      else if (!parse_u64(fields[2], rec.ask_id))
        fail("ask_id must be a non-negative integer");
      else if (!parse_u64(fields[3], rec.qty))
        fail("qty must be a non-negative integer");
      else if (rec.qty == 0)
        fail("qty must be positive");
      else
        out.rows.push_back(rec);
    }
    if (!out.errors.empty() && !lenient) return out;
  }
  return out;
}

ParsedTrades parse_trade_book_file(const std::string& path, bool lenient) {
  std::ifstream in(path);
  if (!in) return {{}, {{0, "cannot open " + path}}};
  return parse_trade_book(in, lenient);
}

std::string serialize_order_book(const std::vector<RawInstruction>& rows) {
  std::string out;
  for (const RawInstruction& r : rows) {
    out += to_string(r.kind);
    out += ',' + std::to_string(r.id);
    out += ',' + std::to_string(r.timestamp);
    out += ',';
    if (r.qty) out += std::to_string(*r.qty);
    out += ',';
    if (r.price) out += std::to_string(*r.price);
    if (r.trigger_timestamp)
      out += ',' + std::to_string(*r.trigger_timestamp);
    else if (r.untraded_qty)
      out += ',' + std::to_string(*r.untraded_qty);
    out += '\n';
  }
  return out;
}

std::string serialize_trade_book(const std::vector<TradeRecord>& rows) {
  std::string out;
  for (const TradeRecord& r : rows) {
    out += std::to_string(r.step_timestamp);
    out += ',' + std::to_string(r.bid_id);
    out += ',' + std::to_string(r.ask_id);
    out += ',' + std::to_string(r.qty);
    out += '\n';
  }
  return out;
}

std::vector<RawInstruction> to_raw(const OrderBook& book) {
  std::vector<RawInstruction> rows;
  rows.reserve(book.size());
  for (const Instruction& ins : book) {
    RawInstruction row;
    row.id = ins.order.id;
    row.timestamp = ins.order.timestamp;
    switch (ins.command) {
      case Command::Buy:
        row.kind = RawKind::Buy;
        row.qty = ins.order.qty;
        row.price = ins.order.price;
        break;
      case Command::Sell:
        row.kind = RawKind::Sell;
        row.qty = ins.order.qty;
        row.price = ins.order.price;
        break;
      case Command::Del:
        row.kind = RawKind::Delete;
        break;
    }
    rows.push_back(row);
  }
  return rows;
}

RawToBookResult book_from_raw(const std::vector<RawInstruction>& rows) {
  RawToBookResult out;
  for (const RawInstruction& r : rows) {
    switch (r.kind) {
      case RawKind::Buy:
        out.book.push_back(Instruction{Command::Buy, Order(r.id, r.timestamp, *r.qty, *r.price)});
        break;
      case RawKind::Sell:
        out.book.push_back(Instruction{Command::Sell, Order(r.id, r.timestamp, *r.qty, *r.price)});
        break;
      case RawKind::Delete:
        out.book.push_back(make_del(r.id, r.timestamp));
        break;
      default:
        out.errors.push_back({r.line, std::string(to_string(r.kind)) +
                                          " is not a primitive instruction; run without --raw"});
        return out;
    }
  }
  return out;
}

PreprocessResult preprocess(const std::vector<RawInstruction>& raw, const PreprocessOptions& opts) {
  PreprocessResult res;

  for (std::size_t i = 1; i < raw.size(); ++i) {
    if (raw[i].timestamp <= raw[i - 1].timestamp) {
      res.errors.push_back({raw[i].line, "timestamps must be strictly increasing"});
      return res;
    }
  }
  for (const RawInstruction& r : raw) {
    if (is_stop(r.kind) && *r.trigger_timestamp < r.timestamp) {
      res.errors.push_back({r.line, "stop trigger precedes the order's placement"});
      return res;
    }
  }

  // reposition stops after the instruction bearing their trigger timestamp,
  // stable among themselves
  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) {
    const RawInstruction& r = raw[i];
    return std::tuple<Timestamp, int, std::size_t>(is_stop(r.kind) ? *r.trigger_timestamp : r.timestamp,
                                                   is_stop(r.kind) ? 1 : 0, i);
  };
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

  struct LiveInfo {
    Quantity qty;
    Price price;
    Timestamp priority;
  };
  std::unordered_map<Id, LiveInfo> live;
  std::unordered_set<Id> issued;

  // replay the emitted primitives only when some update advertises its
  // untraded quantity; disabled again if the book turns out to be illegal
  bool verify = std::any_of(raw.begin(), raw.end(),
                            [](const RawInstruction& r) { return r.untraded_qty.has_value(); });
  Replay replay;

  auto emit = [&](Command cmd, const Order& o, std::size_t raw_idx) {
    res.book.push_back(Instruction{cmd, o});
    res.raw_row.push_back(raw_idx);
    if (verify) {
      try {
        replay.step(res.book.back());
      } catch (const Error&) {
        verify = false;
      }
    }
  };
  auto diagnose = [&](std::size_t line, std::string msg) {
    (opts.strict ? res.errors : res.warnings).push_back({line, std::move(msg)});
  };

  for (std::size_t idx : order) {
    const RawInstruction& r = raw[idx];
    const Timestamp pos = res.book.size() + 1;  // 1-based final position
    switch (r.kind) {
      case RawKind::Buy:
      case RawKind::Sell:
      case RawKind::MarketBuy:
      case RawKind::MarketSell:
      case RawKind::StopBuy:
      case RawKind::StopSell: {
        Price price = is_market(r.kind) ? (buy_side(r.kind) ? kMaxTick : 0) : *r.price;
        res.step_of_timestamp[r.timestamp] = res.book.size();
        emit(buy_side(r.kind) ? Command::Buy : Command::Sell, Order(r.id, pos, *r.qty, price), idx);
        live[r.id] = {*r.qty, price, pos};
        issued.insert(r.id);
        break;
      }
      case RawKind::Delete: {
        if (!issued.count(r.id))
          diagnose(r.line, "DELETE of id " + std::to_string(r.id) + " that was never issued");
        res.step_of_timestamp[r.timestamp] = res.book.size();
        emit(Command::Del, Order(r.id, pos, 1, 0), idx);
        live.erase(r.id);
        break;
      }
      case RawKind::UpdateBuy:
      case RawKind::UpdateSell: {
        if (!issued.count(r.id))
          diagnose(r.line, "UPDATE of id " + std::to_string(r.id) + " that was never issued");
        auto it = live.find(r.id);
        bool retain = it != live.end() && *r.price == it->second.price && *r.qty < it->second.qty;
        if (r.untraded_qty && verify) {
          Quantity resident = replay.resident_qty(r.id);
          if (resident != *r.untraded_qty)
            res.warnings.push_back(
                {r.line, "untraded qty " + std::to_string(*r.untraded_qty) +
                             " disagrees with the replayed resident qty " + std::to_string(resident)});
        }
        emit(Command::Del, Order(r.id, pos, 1, 0), idx);
        Timestamp priority = retain ? it->second.priority : res.book.size() + 1;
        res.step_of_timestamp[r.timestamp] = res.book.size();
        emit(buy_side(r.kind) ? Command::Buy : Command::Sell, Order(r.id, priority, *r.qty, *r.price),
             idx);
        live[r.id] = {*r.qty, *r.price, priority};
        issued.insert(r.id);
        break;
      }
      case RawKind::IocBuy:
      case RawKind::IocSell: {
        res.step_of_timestamp[r.timestamp] = res.book.size();
        emit(buy_side(r.kind) ? Command::Buy : Command::Sell, Order(r.id, pos, *r.qty, *r.price),
             idx);
        emit(Command::Del, Order(r.id, res.book.size() + 1, 1, 0), idx);
        live.erase(r.id);
        issued.insert(r.id);
        break;
      }
    }
  }

  if (res.book.size() > 2 * raw.size())
    throw Error("internal: preprocessing more than doubled the book");
  return res;
}

GroupedTrades group_trades_by_step(const std::vector<TradeRecord>& records,
                                   const std::unordered_map<Timestamp, std::size_t>& step_of_timestamp,
                                   std::size_t num_steps) {
  GroupedTrades out;
  out.steps.assign(num_steps, {});
  for (const TradeRecord& rec : records) {
    auto it = step_of_timestamp.find(rec.step_timestamp);
    if (it == step_of_timestamp.end()) {
      out.errors.push_back({rec.line, "no instruction bears step timestamp " +
                                          std::to_string(rec.step_timestamp)});
      continue;
    }
    out.steps[it->second].emplace_back(rec.bid_id, rec.ask_id, rec.qty);
  }
  return out;
}

GroupedTrades group_trades_by_step(const std::vector<TradeRecord>& records, const OrderBook& book) {
  std::unordered_map<Timestamp, std::size_t> step_of_timestamp;
  for (std::size_t i = 0; i < book.size(); ++i)
    step_of_timestamp.emplace(book[i].order.timestamp, i);
  return group_trades_by_step(records, step_of_timestamp, book.size());
}

}  // namespace cda
