#include <doctest.h>

#include <json.hpp>

#include "cda/checker.hpp"
#include "cda/logio.hpp"
#include "cda/oracle.hpp"
#include "testutil.hpp"

using namespace cda;
using testutil::buy;
using testutil::ord;
using testutil::sell;

namespace {

std::vector<TransactionSet> engine_log(const OrderBook& book) {
  std::vector<TransactionSet> steps(book.size());
  run_book(
      book,
      [&](std::size_t i, const StepOutput& out) {
        steps[i] = canonical_form(out.matching);
        return true;
      },
      ReplayOptions{.check_structure = false, .with_residents = false});
  return steps;
}

}  // namespace

TEST_CASE("check_logs is self-consistent") {
  GenParams p;
  p.seed = 8;
  p.num_instructions = 400;
  OrderBook book = generate_book(p);
  std::vector<TransactionSet> steps = engine_log(book);

  CheckReport report = check_logs(book, steps);
  CHECK(report.verdict == Verdict::Match);
  CHECK(report.mismatches.empty());
  CHECK(report.stats.instructions == book.size());
}

TEST_CASE("a bumped quantity mismatches with the right delta") {
  OrderBook book{buy(1, 1, 5, 10), sell(2, 2, 3, 8), buy(3, 3, 1, 4)};
  std::vector<TransactionSet> steps = engine_log(book);
  REQUIRE(steps[1] == TransactionSet{{1, 2, 3}});

  steps[1] = TransactionSet{{1, 2, 4}};  // exchange claims one unit too many
  CheckReport report = check_logs(book, steps);
  CHECK(report.verdict == Verdict::Mismatch);
  REQUIRE(report.first_mismatch() != nullptr);
  const StepMismatch& mm = *report.first_mismatch();
  CHECK(mm.step == 1);
  CHECK(mm.timestamp == 2);
  CHECK(mm.expected == TransactionSet{{1, 2, 3}});
  CHECK(mm.actual == TransactionSet{{1, 2, 4}});
  REQUIRE(mm.diff.size() == 1);
  CHECK(mm.diff[0].expected_qty == 3);
  CHECK(mm.diff[0].actual_qty == 4);  // delta -1 for the pair
}

TEST_CASE("first mismatch wins unless all_mismatches is set") {
  OrderBook book{buy(1, 1, 5, 10), sell(2, 2, 3, 8), sell(3, 3, 2, 9)};
  std::vector<TransactionSet> steps = engine_log(book);
  steps[1].clear();
  steps[2].clear();

  CheckReport first_only = check_logs(book, steps);
  CHECK(first_only.mismatches.size() == 1);
  CHECK(first_only.first_mismatch()->step == 1);

  CheckReport all = check_logs(book, steps, CheckOptions{true, npos});
  CHECK(all.mismatches.size() == 2);
}

TEST_CASE("illegal books are input errors, never mismatches") {
  OrderBook book{buy(1, 1, 5, 10), buy(1, 2, 4, 9)};  // duplicate id, no Del
  CheckReport report = check_logs(book, {{}, {}});
  CHECK(report.verdict == Verdict::InputError);
  CHECK(report.error_step == 1);
  CHECK_FALSE(report.error.empty());
  CHECK(report.mismatches.empty());
}

TEST_CASE("max_steps bounds the comparison") {
  OrderBook book{buy(1, 1, 5, 10), sell(2, 2, 3, 8)};
  std::vector<TransactionSet> steps = engine_log(book);
  steps[1].clear();
  CheckReport report = check_logs(book, steps, CheckOptions{false, 1});
  CHECK(report.verdict == Verdict::Match);
  CHECK(report.stats.instructions == 1);
}

TEST_CASE("delete before insert: the engine sees the trade the exchange skipped") {
  // the Del targets an order that only arrives afterwards; an exchange that
  // applied it to the late order reports no trade
  OrderBook book{make_del(5, 1), buy(5, 2, 4, 10), sell(6, 3, 2, 9)};
  REQUIRE(is_structured(book).ok);

  std::vector<TransactionSet> exchange(book.size());  // exchange: silence
  CheckReport report = check_logs(book, exchange);
  CHECK(report.verdict == Verdict::Mismatch);
  REQUIRE(report.first_mismatch() != nullptr);
  CHECK(report.first_mismatch()->step == 2);
  CHECK(report.first_mismatch()->expected == TransactionSet{{5, 6, 2}});
  CHECK(report.first_mismatch()->actual.empty());
}

TEST_CASE("cli replay/check round trip exits 0") {
  testutil::TempDir dir;
  auto gen = testutil::run_cli({"gen", "--seed", "3", "--n", "300", "--out-orders",
                                dir.file("orders.csv"), "--out-trades", dir.file("trades.csv")});
  REQUIRE(gen.code == 0);

  auto check = testutil::run_cli(
      {"check", "--orders", dir.file("orders.csv"), "--trades", dir.file("trades.csv")});
  CHECK(check.code == 0);
  CHECK(check.out.find("MATCH") != std::string::npos);

  // the raw path agrees for primitive books
  auto raw = testutil::run_cli(
      {"check", "--raw", "--orders", dir.file("orders.csv"), "--trades", dir.file("trades.csv")});
  CHECK(raw.code == 0);

  // replay emits the same canonical trade book
  auto replay = testutil::run_cli({"replay", "--orders", dir.file("orders.csv"), "--emit-trades",
                                   dir.file("replayed.csv")});
  CHECK(replay.code == 0);
  CHECK(testutil::read_file(dir.file("replayed.csv")) ==
        testutil::read_file(dir.file("trades.csv")));
}

TEST_CASE("cli detects every mutation kind with exit 1") {
  testutil::TempDir dir;
  for (const char* kind : {"drop", "qty", "swap", "move"}) {
    bool exercised = false;
    for (std::uint64_t seed = 1; seed <= 12 && !exercised; ++seed) {
      auto gen = testutil::run_cli({"gen", "--seed", std::to_string(seed), "--n", "200",
                                    "--out-orders", dir.file("o.csv"), "--out-trades",
                                    dir.file("t.csv"), "--mutate", kind});
      if (gen.code != 0) continue;  // kind not applicable at this seed
      exercised = true;
      auto check =
          testutil::run_cli({"check", "--orders", dir.file("o.csv"), "--trades", dir.file("t.csv")});
      CHECK(check.code == 1);
      CHECK(check.out.find("MISMATCH") != std::string::npos);
    }
    CHECK(exercised);
  }
}

TEST_CASE("cli maps missing files and bad usage to exit 2") {
  testutil::TempDir dir;
  CHECK(testutil::run_cli({"check", "--orders", dir.file("missing.csv"), "--trades",
                           dir.file("missing2.csv")})
            .code == 2);
  CHECK(testutil::run_cli({"check"}).code == 2);
  CHECK(testutil::run_cli({"frobnicate"}).code == 2);
  CHECK(testutil::run_cli({"--help"}).code == 0);

  testutil::write_file(dir.file("o.csv"), "BUY,1,100,5,10\n");
  testutil::write_file(dir.file("t.csv"), "100,1,2,0\n");
  CHECK(testutil::run_cli({"check", "--orders", dir.file("o.csv"), "--trades", dir.file("t.csv")})
            .code == 2);
}

TEST_CASE("cli strict mode rejects deletes of unknown ids") {
  testutil::TempDir dir;
  testutil::write_file(dir.file("o.csv"), "DELETE,5,100,,\nBUY,5,200,4,10\nSELL,6,300,2,9\n");
  testutil::write_file(dir.file("t.csv"), "");

  auto strict = testutil::run_cli({"check", "--strict", "--orders", dir.file("o.csv"), "--trades",
                                   dir.file("t.csv")});
  CHECK(strict.code == 2);

  // without --strict the anomaly surfaces as a mismatch instead
  auto lax =
      testutil::run_cli({"check", "--orders", dir.file("o.csv"), "--trades", dir.file("t.csv")});
  CHECK(lax.code == 1);
}

TEST_CASE("cli json output is stable across runs") {
  testutil::TempDir dir;
  auto gen = testutil::run_cli({"gen", "--seed", "5", "--n", "250", "--out-orders",
                                dir.file("o.csv"), "--out-trades", dir.file("t.csv"), "--mutate",
                                "drop"});
  REQUIRE(gen.code == 0);

  auto strip_elapsed = [](const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    j["stats"].erase("elapsed_seconds");
    return j.dump();
  };
  auto a = testutil::run_cli(
      {"check", "--json", "--orders", dir.file("o.csv"), "--trades", dir.file("t.csv")});
  auto b = testutil::run_cli(
      {"check", "--json", "--orders", dir.file("o.csv"), "--trades", dir.file("t.csv")});
  CHECK(a.code == 1);
  CHECK(strip_elapsed(a.out) == strip_elapsed(b.out));

  nlohmann::json j = nlohmann::json::parse(a.out);
  CHECK(j["verdict"] == "mismatch");
  CHECK(j["mismatches"].size() == 1);
}

TEST_CASE("cli checks multiple pairs concurrently with the worst exit code") {
  testutil::TempDir dir;
  REQUIRE(testutil::run_cli({"gen", "--seed", "11", "--n", "150", "--out-orders",
                             dir.file("o1.csv"), "--out-trades", dir.file("t1.csv")})
              .code == 0);
  REQUIRE(testutil::run_cli({"gen", "--seed", "12", "--n", "150", "--out-orders",
                             dir.file("o2.csv"), "--out-trades", dir.file("t2.csv"), "--mutate",
                             "drop"})
              .code == 0);

  auto both = testutil::run_cli({"check", "--orders", dir.file("o1.csv"), "--orders",
                                 dir.file("o2.csv"), "--trades", dir.file("t1.csv"), "--trades",
                                 dir.file("t2.csv")});
  CHECK(both.code == 1);
  CHECK(both.out.find("MATCH") != std::string::npos);
  CHECK(both.out.find("MISMATCH") != std::string::npos);
}

TEST_CASE("cli selfcheck passes on generated books") {
  auto r = testutil::run_cli({"selfcheck", "--seed", "21", "--n", "400"});
  CHECK(r.code == 0);
  CHECK(r.out.find("selfcheck passed") != std::string::npos);
}

TEST_CASE("cli replay emits trades keyed by the source timestamps") {
  testutil::TempDir dir;
  // the update itself crosses the book, so its trade carries timestamp 120
  testutil::write_file(dir.file("o.csv"),
                       "BUY,1,100,5,10\n"
                       "SELL,2,110,2,12\n"
                       "UPDATE_SELL,2,120,2,9\n");
  auto replay = testutil::run_cli(
      {"replay", "--orders", dir.file("o.csv"), "--emit-trades", dir.file("t.csv")});
  REQUIRE(replay.code == 0);
  CHECK(testutil::read_file(dir.file("t.csv")) == "120,1,2,2\n");

  // and the emitted pair checks clean end to end
  auto check =
      testutil::run_cli({"check", "--orders", dir.file("o.csv"), "--trades", dir.file("t.csv")});
  CHECK(check.code == 0);
}

TEST_CASE("cli all-mismatches and max-steps") {
  testutil::TempDir dir;
  testutil::write_file(dir.file("o.csv"),
                       "BUY,1,1,5,10\nSELL,2,2,3,8\nSELL,3,3,2,9\n");
  testutil::write_file(dir.file("t.csv"), "");  // exchange reports nothing

  auto all = testutil::run_cli({"check", "--all-mismatches", "--orders", dir.file("o.csv"),
                                "--trades", dir.file("t.csv")});
  CHECK(all.code == 1);
  CHECK(all.out.find("step 1") != std::string::npos);
  CHECK(all.out.find("step 2") != std::string::npos);
  CHECK(all.out.find("divergence cascade") != std::string::npos);

  auto limited = testutil::run_cli({"check", "--max-steps", "1", "--orders", dir.file("o.csv"),
                                    "--trades", dir.file("t.csv")});
  CHECK(limited.code == 0);  // the first step generates no trades
}
