#include "cda/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <random>
#include <unordered_map>

namespace cda {

namespace {

// 4 bits per order and at most 6 orders per side keep a memo key inside
// 64 bits: asks at bits 0..23, bids at 24..47, pair index at 48..63
constexpr Quantity kPackLimit = 15;
constexpr std::size_t kPackSide = 6;

std::uint64_t pack(const std::vector<Quantity>& resid) {
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < resid.size(); ++i) out |= resid[i] << (4 * i);
  return out;
}

struct Enumerator {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // tradable (bid idx, ask idx)
  std::vector<Quantity> bid_resid;
  std::vector<Quantity> ask_resid;
  std::unordered_map<std::uint64_t, Quantity> memo;
  std::size_t max_states;

  Quantity best(std::size_t p) {
    if (p == pairs.size()) return 0;
    std::uint64_t key = (static_cast<std::uint64_t>(p) << 48) | (pack(bid_resid) << 24) | pack(ask_resid);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    if (memo.size() >= max_states)
      throw SizeLimitError("max_matching_volume exceeded its state budget");

    auto [bi, ai] = pairs[p];
    Quantity cap = std::min(bid_resid[bi], ask_resid[ai]);
    Quantity out = 0;
    for (Quantity q = 0; q <= cap; ++q) {
      bid_resid[bi] -= q;
      ask_resid[ai] -= q;
      out = std::max(out, q + best(p + 1));
      bid_resid[bi] += q;
      ask_resid[ai] += q;
    }
    memo.emplace(key, out);
    return out;
  }
};

}  // namespace

Quantity max_matching_volume(const OrderDomain& d, const OracleLimits& limits) {
  if (!is_admissible(d))
    throw PreconditionError("max_matching_volume requires an admissible order-domain");
  if (limits.max_orders_per_side > kPackSide || limits.max_qty > kPackLimit)
    throw PreconditionError("oracle limits exceed the packed-state capacity");
  if (d.bids.size() > limits.max_orders_per_side || d.asks.size() > limits.max_orders_per_side)
    throw SizeLimitError("max_matching_volume: too many orders per side");
  for (const std::vector<Order>* side : {&d.bids, &d.asks})
    for (const Order& o : *side)
      if (o.qty > limits.max_qty) throw SizeLimitError("max_matching_volume: quantity too large");

  Enumerator e;
  for (std::size_t i = 0; i < d.bids.size(); ++i)
    for (std::size_t j = 0; j < d.asks.size(); ++j)
      if (tradable(d.bids[i], d.asks[j])) e.pairs.emplace_back(i, j);
  for (const Order& o : d.bids) e.bid_resid.push_back(o.qty);
  for (const Order& o : d.asks) e.ask_resid.push_back(o.qty);
  e.max_states = limits.max_states;
  return e.best(0);
}

namespace {

// linear scan, no ordered container on purpose
std::size_t most_competitive_tradable(const std::vector<Order>& side, const Order& incoming,
                                      bool side_is_bids) {
  std::size_t found = side.size();
  for (std::size_t i = 0; i < side.size(); ++i) {
    bool ok = side_is_bids ? tradable(side[i], incoming) : tradable(incoming, side[i]);
    if (!ok) continue;
    if (found == side.size()) {
      found = i;
    } else if (side_is_bids ? more_competitive_bid(side[i], side[found])
                            : more_competitive_ask(side[i], side[found])) {
      found = i;
    }
  }
  return found;
}

void alt_match(std::vector<Order>& opposite, std::vector<Order>& own, Order incoming,
               bool opposite_is_bids, TransactionSet& m) {
  Quantity remaining = incoming.qty;
  for (;;) {
    std::size_t at = most_competitive_tradable(opposite, incoming, opposite_is_bids);
    if (at == opposite.size()) break;
    Order& other = opposite[at];
    Quantity q = std::min(remaining, other.qty);
    if (opposite_is_bids)
      m.insert(m.begin(), Transaction(other.id, incoming.id, q));
    else
      m.insert(m.begin(), Transaction(incoming.id, other.id, q));
    remaining -= q;
    if (other.qty == q)
      opposite.erase(opposite.begin() + static_cast<std::ptrdiff_t>(at));
    else
      other.qty -= q;
    if (remaining == 0) return;
  }
  incoming.qty = remaining;
  own.push_back(incoming);
}

}  // namespace

StepOutput alt_process(std::vector<Order> bids, std::vector<Order> asks, const Instruction& tau) {
  if (matchable(bids, asks)) throw IllegalInputError("resident orders are matchable");
  if (!is_admissible(absorb(bids, asks, tau)))
    throw IllegalInputError("absorbed order-domain is inadmissible (duplicate id or timestamp)");

  TransactionSet m;
  switch (tau.command) {
    case Command::Del: {
      auto drop = [id = tau.order.id](const Order& o) { return o.id == id; };
      std::erase_if(bids, drop);
      std::erase_if(asks, drop);
      break;
    }
    case Command::Buy:
      alt_match(asks, bids, tau.order, false, m);
      break;
    case Command::Sell:
      alt_match(bids, asks, tau.order, true, m);
      break;
  }
  return StepOutput{std::move(bids), std::move(asks), std::move(m)};
}

namespace {

// all draws go through these two helpers so books are reproducible from the
// seed alone
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

double draw_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

constexpr double kReuseProbability = 0.10;

}  // namespace

OrderBook generate_book(const GenParams& p) {
  if (p.max_price < 1 || p.max_qty < 1)
    throw PreconditionError("generate_book requires max_price and max_qty >= 1");
  if (p.del_probability < 0 || p.buy_probability < 0 ||
      p.del_probability + p.buy_probability > 1.0)
    throw PreconditionError("generate_book probabilities must be within [0, 1] and sum to at most 1");

  std::mt19937_64 rng(p.seed);
  OrderBook book;
  book.reserve(p.num_instructions);
  std::vector<Id> issued;
  Id next_id = 1;

  for (std::size_t i = 0; i < p.num_instructions; ++i) {
    Timestamp ts = i + 1;
    double u = draw_unit(rng);
    if (u < p.del_probability && !issued.empty()) {
      Id target = issued[draw_below(rng, issued.size())];
      book.push_back(make_del(target, ts));
      continue;
    }
    Command cmd = u < p.del_probability + p.buy_probability ? Command::Buy : Command::Sell;
    Id id;
    if (!book.empty() && book.back().command == Command::Del &&
        draw_unit(rng) < kReuseProbability) {
      id = book.back().order.id;  // reuse immediately after its Del
    } else {
      id = next_id++;
      issued.push_back(id);
    }
    Quantity qty = 1 + draw_below(rng, p.max_qty);
    Price price = 1 + draw_below(rng, p.max_price);
    book.push_back(Instruction{cmd, Order(id, ts, qty, price)});
  }

  assert(is_structured(book).ok);
  return book;
}

const char* to_string(MutationKind kind) {
  switch (kind) {
    case MutationKind::Drop: return "drop";
    case MutationKind::Qty: return "qty";
    case MutationKind::Swap: return "swap";
    case MutationKind::Move: return "move";
  }
  return "?";
}

std::optional<MutationKind> mutation_kind_from(std::string_view name) {
  if (name == "drop") return MutationKind::Drop;
  if (name == "qty") return MutationKind::Qty;
  if (name == "swap") return MutationKind::Swap;
  if (name == "move") return MutationKind::Move;
  return std::nullopt;
}

MutationResult mutate_trade_log(const std::vector<TransactionSet>& steps, MutationKind kind,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MutationResult out{steps, npos};

  switch (kind) {
    case MutationKind::Drop:
    case MutationKind::Qty: {
      std::vector<std::pair<std::size_t, std::size_t>> sites;
      for (std::size_t s = 0; s < steps.size(); ++s)
        for (std::size_t t = 0; t < steps[s].size(); ++t) sites.emplace_back(s, t);
      if (sites.empty())
        throw PreconditionError("trade log has no transactions to mutate");
      auto [s, t] = sites[draw_below(rng, sites.size())];
      if (kind == MutationKind::Drop) {
        out.steps[s].erase(out.steps[s].begin() + static_cast<std::ptrdiff_t>(t));
      } else {
        Transaction& x = out.steps[s][t];
        x.qty = (x.qty == 1 || draw_unit(rng) < 0.5) ? x.qty + 1 : x.qty - 1;
      }
      out.mutated_step = s;
      return out;
    }
    case MutationKind::Swap: {
      // swapping bid ids changes the canonical form only when the bids differ
      // and the (ask, qty) pairs do not coincide
      std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> sites;
      for (std::size_t s = 0; s < steps.size(); ++s)
        for (std::size_t i = 0; i < steps[s].size(); ++i)
          for (std::size_t j = i + 1; j < steps[s].size(); ++j) {
            const Transaction& a = steps[s][i];
            const Transaction& b = steps[s][j];
            if (a.bid_id != b.bid_id && (a.ask_id != b.ask_id || a.qty != b.qty))
              sites.emplace_back(s, i, j);
          }
      if (sites.empty())
        throw PreconditionError("trade log has no detectable same-step bid swap");
      auto [s, i, j] = sites[draw_below(rng, sites.size())];
      std::swap(out.steps[s][i].bid_id, out.steps[s][j].bid_id);
      out.mutated_step = s;
      return out;
    }
    case MutationKind::Move: {
      std::vector<std::tuple<std::size_t, std::size_t, std::ptrdiff_t>> sites;
      for (std::size_t s = 0; s < steps.size(); ++s)
        for (std::size_t t = 0; t < steps[s].size(); ++t) {
          if (s > 0) sites.emplace_back(s, t, -1);
          if (s + 1 < steps.size()) sites.emplace_back(s, t, +1);
        }
      if (sites.empty())
        throw PreconditionError("trade log has no transaction to move");
      auto [s, t, d] = sites[draw_below(rng, sites.size())];
      std::size_t dst = s + static_cast<std::size_t>(d);
      Transaction moved = out.steps[s][t];
      out.steps[s].erase(out.steps[s].begin() + static_cast<std::ptrdiff_t>(t));
      out.steps[dst].push_back(moved);
      out.mutated_step = std::min(s, dst);
      return out;
    }
  }
  throw Error("internal: unknown mutation kind");
}

}  // namespace cda
