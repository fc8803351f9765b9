#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "doctest.h"
#include "slatebandits/ingestion.hpp"

using namespace slatebandits;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = (std::filesystem::temp_directory_path() / name).string();
  }
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& content) {
    std::ofstream out(path);
    out << content;
  }
};

}  // namespace

TEST_SUITE_BEGIN("ingestion");

TEST_CASE("header-only file parses to an empty record list") {
  TempFile f("sb_header_only.csv");
  f.write("advertiser_id,day,hour,exchange_id,second_bid\n");
  const auto parsed = parse_bid_log(f.path);
  CHECK(parsed.records.empty());
  CHECK(parsed.diagnostics.empty());
}

TEST_CASE("a valid row becomes one record") {
  TempFile f("sb_one_row.csv");
  f.write("advertiser_id,day,hour,exchange_id,second_bid\n1458,2,18,1,43.5\n");
  const auto parsed = parse_bid_log(f.path);
  REQUIRE(parsed.records.size() == 1);
  const auto& r = parsed.records[0];
  CHECK(r.advertiser_id == "1458");
  CHECK(r.day == 2);
  CHECK(r.hour == 18);
  CHECK(r.exchange_id == 1);
  CHECK(r.second_bid == doctest::Approx(43.5));
}

TEST_CASE("malformed rows are reported with line numbers and skipped") {
  TempFile f("sb_malformed.csv");
  f.write(
      "advertiser_id,day,hour,exchange_id,second_bid\n"
      "1458,2,18,1,43.5\n"
      "1458,2,18,1,-3.0\n"       // negative bid
      "1458,2,18,1\n"            // missing column
      "1458,2,18,1,abc\n"        // non-numeric bid
      "1458,2,99,1,5.0\n"        // hour out of range
      "1458,2,18,2,12.0\n");
  const auto parsed = parse_bid_log(f.path);
  CHECK(parsed.records.size() == 2);
  REQUIRE(parsed.diagnostics.size() == 4);
  CHECK(parsed.diagnostics[0].line == 3);
  CHECK(parsed.diagnostics[1].line == 4);
  CHECK(parsed.diagnostics[2].line == 5);
  CHECK(parsed.diagnostics[3].line == 6);
}

TEST_CASE("unreadable files and bad headers are errors") {
  CHECK_THROWS_AS(parse_bid_log("/nonexistent/sb.csv"), std::runtime_error);
  TempFile f("sb_bad_header.csv");
  f.write("a,b,c\n1,2,3\n");
  CHECK_THROWS_AS(parse_bid_log(f.path), std::runtime_error);
}

TEST_CASE("bootstrap with a single value per exchange is constant") {
  std::vector<BidLogRecord> records{{"a", 1, 7, 1, 5.0}, {"a", 1, 7, 2, 5.0}};
  Rng rng(1);
  const auto dist = build_bid_distribution(records, "a", 1, 7, 100, rng);
  CHECK(dist.first_list.size() == 100);
  CHECK(dist.second_list.size() == 100);
  CHECK(dist.max_value == 5.0);
  Rng rng2(2);
  for (int i = 0; i < 50; ++i) {
    const auto [x, w] = sample_bid_pair(dist, rng2);
    CHECK(x == 1.0);
    CHECK(w == 1.0);
  }
}

TEST_CASE("bootstrap lists draw only from the filtered multiset") {
  std::vector<BidLogRecord> records;
  const std::set<double> exchange1_values{1.0, 2.0, 3.0};
  const std::set<double> exchange2_values{10.0, 20.0};
  for (double v : exchange1_values) records.push_back({"adv", 3, 12, 4, v});
  for (double v : exchange2_values) records.push_back({"adv", 3, 12, 9, v});
  records.push_back({"other", 3, 12, 4, 99.0});  // filtered out
  records.push_back({"adv", 4, 12, 4, 77.0});    // wrong day
  records.push_back({"adv", 3, 13, 9, 55.0});    // wrong hour
  Rng rng(3);
  const auto dist = build_bid_distribution(records, "adv", 3, 12, 10000, rng);
  for (double v : dist.first_list) CHECK(exchange1_values.count(v) == 1);
  for (double v : dist.second_list) CHECK(exchange2_values.count(v) == 1);
  CHECK(dist.max_value == 20.0);
  // With 10000 draws every support point appears.
  for (double v : exchange1_values)
    CHECK(std::count(dist.first_list.begin(), dist.first_list.end(), v) > 0);
}

TEST_CASE("default bootstrap size is 10000") {
  std::vector<BidLogRecord> records{{"a", 1, 7, 1, 5.0}, {"a", 1, 7, 2, 6.0}};
  Rng rng(1);
  const auto dist = build_bid_distribution(records, "a", 1, 7, rng);
  CHECK(dist.first_list.size() == 10000);
  CHECK(dist.second_list.size() == 10000);
}

TEST_CASE("empty filters and missing exchanges are errors") {
  std::vector<BidLogRecord> records{{"a", 1, 7, 1, 5.0}, {"a", 1, 7, 2, 5.0}};
  Rng rng(1);
  CHECK_THROWS_AS(build_bid_distribution(records, "missing", 1, 7, 10, rng),
                  std::runtime_error);
  std::vector<BidLogRecord> one_exchange{{"a", 1, 7, 1, 5.0}};
  CHECK_THROWS_AS(build_bid_distribution(one_exchange, "a", 1, 7, 10, rng),
                  std::runtime_error);
  std::vector<BidLogRecord> three_exchanges{
      {"a", 1, 7, 1, 5.0}, {"a", 1, 7, 2, 5.0}, {"a", 1, 7, 3, 5.0}};
  CHECK_THROWS_AS(build_bid_distribution(three_exchanges, "a", 1, 7, 10, rng),
                  std::runtime_error);
}

TEST_CASE("bootstrapping is deterministic given the stream") {
  std::vector<BidLogRecord> records;
  for (int i = 0; i < 20; ++i) {
    records.push_back({"a", 1, 7, 1, 1.0 + i});
    records.push_back({"a", 1, 7, 2, 2.0 + i});
  }
  Rng rng_a(42), rng_b(42);
  const auto da = build_bid_distribution(records, "a", 1, 7, 500, rng_a);
  const auto db = build_bid_distribution(records, "a", 1, 7, 500, rng_b);
  CHECK(da.first_list == db.first_list);
  CHECK(da.second_list == db.second_list);
}

TEST_CASE("the synthetic log generator round-trips through the pipeline") {
  TempFile f("sb_synthetic.csv");
  Rng rng(7);
  write_synthetic_bid_log(f.path, {"1458", "3358"}, {2}, {15, 18}, {1, 2}, 50,
                          std::log(30.0), 0.6, rng);
  const auto parsed = parse_bid_log(f.path);
  CHECK(parsed.diagnostics.empty());
  CHECK(parsed.records.size() == 2 * 1 * 2 * 2 * 50);
  Rng rng2(9);
  const auto dist = build_bid_distribution(parsed.records, "1458", 2, 18, 2000, rng2);
  CHECK(dist.first_list.size() == 2000);
  Rng rng3(11);
  for (int i = 0; i < 500; ++i) {
    const auto [x, w] = sample_bid_pair(dist, rng3);
    CHECK(w <= x);
    CHECK(x <= 1.0);
    CHECK(w >= 0.0);
  }
}

TEST_SUITE_END();
