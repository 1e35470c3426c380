#include <doctest.h>

#include <random>

#include "cda/core.hpp"
#include "testutil.hpp"

using namespace cda;
using testutil::ord;

TEST_CASE("order and transaction invariants") {
  CHECK_THROWS_AS(Order(1, 1, 0, 10), PreconditionError);
  CHECK_THROWS_AS(Transaction(1, 2, 0), PreconditionError);
  CHECK(Order(1, 1, 1, 0).qty == 1);
}

TEST_CASE("more_competitive_bid") {
  CHECK(more_competitive_bid(ord(1, 5, 1, 10), ord(2, 1, 1, 9)));
  CHECK_FALSE(more_competitive_bid(ord(1, 5, 1, 10), ord(2, 2, 1, 10)));
  CHECK_FALSE(more_competitive_bid(ord(1, 5, 1, 10), ord(1, 5, 1, 10)));
}

TEST_CASE("more_competitive_ask") {
  CHECK(more_competitive_ask(ord(1, 5, 1, 8), ord(2, 1, 1, 9)));
  CHECK_FALSE(more_competitive_ask(ord(1, 5, 1, 8), ord(2, 2, 1, 8)));
  CHECK(more_competitive_ask(ord(1, 2, 1, 8), ord(2, 5, 1, 8)));
}

TEST_CASE("competitiveness is a strict total order on distinct-timestamp sets") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 200; ++round) {
    std::vector<Order> set;
    std::size_t n = 2 + testutil::below(rng, 5);
    for (std::size_t i = 0; i < n; ++i)
      set.push_back(ord(i, i + 1, 1, testutil::below(rng, 4)));
    std::shuffle(set.begin(), set.end(), rng);

    auto check_order = [&](auto cmp) {
      for (const Order& a : set) CHECK_FALSE(cmp(a, a));  // irreflexive
      for (const Order& a : set)
        for (const Order& b : set) {
          if (&a == &b) continue;
          CHECK(cmp(a, b) != cmp(b, a));  // asymmetric and total
          for (const Order& c : set)
            if (cmp(a, b) && cmp(b, c)) CHECK(cmp(a, c));  // transitive
        }
    };
    check_order([](const Order& a, const Order& b) { return more_competitive_bid(a, b); });
    check_order([](const Order& a, const Order& b) { return more_competitive_ask(a, b); });
  }
}

TEST_CASE("tradable") {
  CHECK(tradable(ord(1, 1, 1, 10), ord(2, 2, 1, 8)));
  CHECK(tradable(ord(1, 1, 1, 8), ord(2, 2, 1, 8)));
  CHECK_FALSE(tradable(ord(1, 1, 1, 7), ord(2, 2, 1, 8)));
}

TEST_CASE("matchable") {
  CHECK_FALSE(matchable({ord(1, 1, 1, 7)}, {ord(2, 2, 1, 8)}));
  CHECK(matchable({ord(1, 1, 1, 7), ord(3, 3, 1, 9)}, {ord(2, 2, 1, 8)}));
  CHECK_FALSE(matchable({}, {ord(2, 2, 1, 8)}));
}

TEST_CASE("matchable agrees with the quantified definition") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 500; ++round) {
    std::vector<Order> bids, asks;
    for (std::size_t i = 0; i < testutil::below(rng, 5); ++i)
      bids.push_back(ord(i + 1, i + 1, 1, testutil::below(rng, 6)));
    for (std::size_t i = 0; i < testutil::below(rng, 5); ++i)
      asks.push_back(ord(i + 100, i + 100, 1, testutil::below(rng, 6)));
    bool naive = false;
    for (const Order& b : bids)
      for (const Order& a : asks) naive = naive || tradable(b, a);
    CHECK(matchable(bids, asks) == naive);
  }
}

TEST_CASE("qty_bid / qty_ask / vol") {
  TransactionSet t{{1, 2, 3}, {1, 3, 4}, {5, 3, 2}};
  CHECK(qty_bid(t, 1) == 7);
  CHECK(qty_bid({}, 1) == 0);
  CHECK(qty_bid({{1, 2, 3}}, 9) == 0);
  CHECK(qty_ask(t, 3) == 6);

  CHECK(vol({{1, 2, 3}, {1, 3, 4}}) == 7);
  CHECK(vol({}) == 0);
  CHECK(vol({{1, 2, 3}, {1, 2, 3}}) == 6);  // duplicates counted
}

TEST_CASE("vol equals both per-side total sums") {
  std::mt19937_64 rng(13);
  for (int round = 0; round < 200; ++round) {
    TransactionSet m;
    for (std::size_t i = 0; i < testutil::below(rng, 8); ++i)
      m.emplace_back(testutil::below(rng, 4), testutil::below(rng, 4),
                     1 + testutil::below(rng, 9));
    Quantity by_bid = 0, by_ask = 0;
    for (Id id = 0; id < 4; ++id) {
      by_bid += qty_bid(m, id);
      by_ask += qty_ask(m, id);
    }
    CHECK(vol(m) == by_bid);
    CHECK(vol(m) == by_ask);
  }
}

TEST_CASE("sums refuse to wrap") {
  Quantity huge = kMaxTick - 1;
  CHECK_THROWS_AS(vol({{1, 2, huge}, {1, 3, huge}}), OverflowError);
  CHECK_THROWS_AS(qty_bid({{1, 2, huge}, {1, 3, huge}}, 1), OverflowError);
  CHECK_THROWS_AS(canonical_form({{1, 2, huge}, {1, 2, huge}}), OverflowError);
}

TEST_CASE("transaction_valid") {
  OrderDomain d{{ord(1, 1, 5, 10)}, {ord(2, 2, 3, 8)}};
  CHECK(transaction_valid({1, 2, 3}, d));
  CHECK_FALSE(transaction_valid({1, 2, 4}, d));
  OrderDomain low{{ord(1, 1, 5, 7)}, {ord(2, 2, 3, 8)}};
  CHECK_FALSE(transaction_valid({1, 2, 1}, low));
}

TEST_CASE("is_matching") {
  OrderDomain d{{ord(1, 1, 5, 10)}, {ord(2, 2, 3, 8)}};
  CHECK(is_matching({}, d));
  CHECK(is_matching({{1, 2, 3}}, d));
  CHECK_FALSE(is_matching({{1, 2, 2}, {1, 2, 2}}, d));  // total 4 > ask qty 3
  CHECK_THROWS_AS(is_matching({}, OrderDomain{{ord(1, 1, 1, 1)}, {ord(1, 2, 1, 5)}}),
                  PreconditionError);
}

TEST_CASE("canonical_form") {
  TransactionSet m{{1, 2, 3}, {1, 2, 4}, {1, 3, 1}};
  CHECK(canonical_form(m) == TransactionSet{{1, 2, 7}, {1, 3, 1}});
  CHECK(canonical_form({}).empty());
  CHECK(canonical_form({{1, 2, 3}}) == TransactionSet{{1, 2, 3}});
}

TEST_CASE("canonical_form properties") {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 300; ++round) {
    TransactionSet m;
    for (std::size_t i = 0; i < testutil::below(rng, 10); ++i)
      m.emplace_back(testutil::below(rng, 3), testutil::below(rng, 3),
                     1 + testutil::below(rng, 5));
    TransactionSet c = canonical_form(m);
    CHECK(canonical_form(c) == c);  // idempotent
    CHECK(vol(c) == vol(m));
    for (Id b = 0; b < 3; ++b)
      for (Id a = 0; a < 3; ++a) {
        Quantity mc = 0, cc = 0;
        for (const Transaction& t : m)
          if (t.bid_id == b && t.ask_id == a) mc += t.qty;
        for (const Transaction& t : c)
          if (t.bid_id == b && t.ask_id == a) cc += t.qty;
        CHECK(mc == cc);  // pair totals preserved
      }
    // output sorted ascending (bid_id, ask_id)
    for (std::size_t i = 1; i < c.size(); ++i)
      CHECK(std::make_pair(c[i - 1].bid_id, c[i - 1].ask_id) <
            std::make_pair(c[i].bid_id, c[i].ask_id));
  }
}

TEST_CASE("is_matching survives canonicalization") {
  std::mt19937_64 rng(19);
  OrderDomain d{{ord(1, 1, 6, 10), ord(2, 2, 4, 9)}, {ord(3, 3, 5, 8), ord(4, 4, 2, 9)}};
  for (int round = 0; round < 300; ++round) {
    TransactionSet m;
    for (std::size_t i = 0; i < testutil::below(rng, 5); ++i)
      m.emplace_back(1 + testutil::below(rng, 2), 3 + testutil::below(rng, 2),
                     1 + testutil::below(rng, 3));
    if (is_matching(m, d)) CHECK(is_matching(canonical_form(m), d));
  }
}

TEST_CASE("traded_bids") {
  std::vector<Order> b{ord(1, 1, 5, 10)};
  CHECK(traded_bids({{1, 2, 3}}, b) == std::vector<Order>{ord(1, 1, 3, 10)});
  CHECK(traded_bids({}, b).empty());
  CHECK(traded_bids({{1, 2, 2}, {1, 3, 1}}, b) == std::vector<Order>{ord(1, 1, 3, 10)});
  CHECK_THROWS_AS(traded_bids({{9, 2, 1}}, b), PreconditionError);
}

TEST_CASE("multiset_diff") {
  std::vector<Order> s1{ord(1, 1, 5, 10)};
  CHECK(multiset_diff(s1, {ord(1, 1, 3, 10)}) == std::vector<Order>{ord(1, 1, 2, 10)});
  CHECK(multiset_diff(s1, {ord(1, 1, 5, 10)}).empty());
  std::vector<Order> s2{ord(1, 1, 5, 10), ord(2, 2, 4, 9)};
  CHECK(multiset_diff(s2, {}) == s2);

  CHECK_THROWS_AS(multiset_diff(s1, {ord(9, 9, 1, 1)}), PreconditionError);       // unknown id
  CHECK_THROWS_AS(multiset_diff(s1, {ord(1, 2, 3, 10)}), PreconditionError);      // attr mismatch
  CHECK_THROWS_AS(multiset_diff(s1, {ord(1, 1, 6, 10)}), PreconditionError);      // over-subtraction
}

TEST_CASE("multiset_diff after traded_bids keeps attributes and drops empties") {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 200; ++round) {
    std::vector<Order> bids;
    std::size_t n = 1 + testutil::below(rng, 5);
    for (std::size_t i = 0; i < n; ++i)
      bids.push_back(ord(i + 1, i + 1, 1 + testutil::below(rng, 6), testutil::below(rng, 9)));
    TransactionSet m;
    for (const Order& b : bids) {
      Quantity take = testutil::below(rng, b.qty + 1);
      if (take > 0) m.emplace_back(b.id, 100, take);
    }
    std::vector<Order> rest = multiset_diff(bids, traded_bids(m, bids));
    for (const Order& r : rest) {
      CHECK(r.qty > 0);
      const Order* original = nullptr;
      for (const Order& b : bids)
        if (b.id == r.id) original = &b;
      REQUIRE(original != nullptr);
      CHECK(r.timestamp == original->timestamp);
      CHECK(r.price == original->price);
      CHECK(r.qty == original->qty - qty_bid(m, r.id));
    }
  }
}

TEST_CASE("orders_equal ignores order and nothing else") {
  std::vector<Order> a{ord(1, 1, 5, 10), ord(2, 2, 3, 9)};
  std::vector<Order> b{ord(2, 2, 3, 9), ord(1, 1, 5, 10)};
  CHECK(orders_equal(a, b));
  CHECK_FALSE(orders_equal(a, {ord(1, 1, 5, 10)}));
  CHECK_FALSE(orders_equal(a, {ord(2, 2, 3, 9), ord(1, 1, 4, 10)}));
}

TEST_CASE("transaction price and timestamp decorators") {
  Order bid = ord(1, 5, 1, 10), ask = ord(2, 3, 1, 8);
  CHECK(transaction_price(bid, ask) == 8);
  CHECK(transaction_timestamp(bid, ask) == 5);
  CHECK_THROWS_AS(transaction_price(ord(1, 1, 1, 7), ord(2, 2, 1, 8)), PreconditionError);
}
