#pragma once
// Auction bid-log ingestion. Parses the CSV schema
//   advertiser_id,day,hour,exchange_id,second_bid
// and turns filtered second-bid values into a BidDistribution by
// bootstrapping a fixed-size list per ad exchange.
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slatebandits/auction.hpp"
#include "slatebandits/rng.hpp"

namespace slatebandits {

struct BidLogRecord {
  std::string advertiser_id;
  int day = 0;
  int hour = 0;
  int exchange_id = 0;
  double second_bid = 0.0;
};

struct ParseDiagnostic {
  int line = 0;
  std::string message;
};

struct ParsedBidLog {
  std::vector<BidLogRecord> records;
  std::vector<ParseDiagnostic> diagnostics;  // malformed lines, with line numbers
};

inline constexpr const char* kBidLogHeader = "advertiser_id,day,hour,exchange_id,second_bid";

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline bool parse_int(const std::string& s, int& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && !s.empty();
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace detail

// Reads a bid log. Malformed data lines are skipped and reported; an
// unreadable file or a wrong header is an error.
inline ParsedBidLog parse_bid_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_bid_log: cannot open '" + path + "'");
  ParsedBidLog out;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line))
    throw std::runtime_error("parse_bid_log: empty file '" + path + "'");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kBidLogHeader)
    throw std::runtime_error("parse_bid_log: expected header '" +
                             std::string(kBidLogHeader) + "'");
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 5) {
      out.diagnostics.push_back({line_no, "expected 5 columns, got " +
                                              std::to_string(fields.size())});
      continue;
    }
    BidLogRecord rec;
    rec.advertiser_id = fields[0];
    if (!detail::parse_int(fields[1], rec.day)) {
      out.diagnostics.push_back({line_no, "non-numeric day '" + fields[1] + "'"});
      continue;
    }
    if (!detail::parse_int(fields[2], rec.hour) || rec.hour < 0 || rec.hour > 23) {
      out.diagnostics.push_back({line_no, "hour must be an integer in [0, 23]"});
      continue;
    }
    if (!detail::parse_int(fields[3], rec.exchange_id)) {
      out.diagnostics.push_back({line_no, "non-numeric exchange_id '" + fields[3] + "'"});
      continue;
    }
    if (!detail::parse_double(fields[4], rec.second_bid)) {
      out.diagnostics.push_back({line_no, "non-numeric second_bid '" + fields[4] + "'"});
      continue;
    }
    if (!(rec.second_bid > 0.0)) {
      out.diagnostics.push_back({line_no, "second_bid must be positive"});
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

// Bootstrap procedure: filter by (advertiser, day, hour), split by exchange
// (exactly two ids must be present; the smaller id feeds L1), then sample
// bootstrap_n values with replacement per exchange. Normalization by the
// joint maximum happens at bid-sampling time.
inline BidDistribution build_bid_distribution(std::span<const BidLogRecord> records,
                                              const std::string& advertiser, int day,
                                              int hour, int bootstrap_n, Rng& rng) {
  if (bootstrap_n < 1) throw std::invalid_argument("build_bid_distribution: bootstrap_n < 1");
  std::map<int, std::vector<double>> by_exchange;
  for (const auto& rec : records)
    if (rec.advertiser_id == advertiser && rec.day == day && rec.hour == hour)
      by_exchange[rec.exchange_id].push_back(rec.second_bid);
  if (by_exchange.empty())
    throw std::runtime_error("build_bid_distribution: no records match the filter");
  if (by_exchange.size() != 2)
    throw std::runtime_error("build_bid_distribution: expected exactly two exchanges, found " +
                             std::to_string(by_exchange.size()));
  std::vector<std::vector<double>> lists;
  for (auto& [id, values] : by_exchange) {
    std::vector<double> boot;
    boot.reserve(static_cast<std::size_t>(bootstrap_n));
    for (int i = 0; i < bootstrap_n; ++i)
      boot.push_back(values[rng.uniform_index(values.size())]);
    lists.push_back(std::move(boot));
  }
  return BidDistribution::from_lists(std::move(lists[0]), std::move(lists[1]));
}

inline BidDistribution build_bid_distribution(std::span<const BidLogRecord> records,
                                              const std::string& advertiser, int day,
                                              int hour, Rng& rng) {
  return build_bid_distribution(records, advertiser, day, hour, 10000, rng);
}

// Test and demo helper: emits a synthetic log in the exact ingestion schema,
// with lognormal second bids on two exchanges.
inline void write_synthetic_bid_log(const std::string& path,
                                    const std::vector<std::string>& advertisers,
                                    const std::vector<int>& days,
                                    const std::vector<int>& hours,
                                    std::pair<int, int> exchange_ids,
                                    int rows_per_exchange, double mu_log, double sigma_log,
                                    Rng& rng) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_synthetic_bid_log: cannot open '" + path + "'");
  out << kBidLogHeader << '\n';
  char buf[64];
  for (const auto& adv : advertisers)
    for (int day : days)
      for (int hour : hours)
        for (int ex : {exchange_ids.first, exchange_ids.second})
          for (int r = 0; r < rows_per_exchange; ++r) {
            const double bid = std::exp(mu_log + sigma_log * rng.normal());
            std::snprintf(buf, sizeof(buf), "%.6f", bid);
            out << adv << ',' << day << ',' << hour << ',' << ex << ',' << buf << '\n';
          }
}

}  // namespace slatebandits
