#pragma once
// Second-price auction primitives: empirical bid distributions built from two
// per-exchange value lists, and the publisher revenue at a given reserve.
#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "slatebandits/rng.hpp"

namespace slatebandits {

// Bootstrapped bid model for one SSP. Holds two raw value lists (one per ad
// exchange) and their joint maximum, used as the normalizer so that every
// emitted bid pair lies in [0, 1].
struct BidDistribution {
  std::vector<double> first_list;   // L1
  std::vector<double> second_list;  // L2
  double max_value = 0.0;           // max over both lists

  static BidDistribution from_lists(std::vector<double> l1, std::vector<double> l2) {
    if (l1.empty() || l2.empty())
      throw std::invalid_argument("BidDistribution: empty value list");
    if (l1.size() != l2.size())
      throw std::invalid_argument("BidDistribution: lists differ in size");
    for (const auto& list : {l1, l2})
      for (double v : list)
        if (!(v > 0.0)) throw std::invalid_argument("BidDistribution: values must be positive");
    BidDistribution d;
    d.max_value = std::max(*std::max_element(l1.begin(), l1.end()),
                           *std::max_element(l2.begin(), l2.end()));
    d.first_list = std::move(l1);
    d.second_list = std::move(l2);
    return d;
  }
};

// One round of bids: draw a value from each exchange list, the larger becomes
// the top bid X and the smaller the second bid W, both normalized so X <= 1.
inline std::pair<double, double> sample_bid_pair(const BidDistribution& dist, Rng& rng) {
  if (dist.first_list.empty() || dist.second_list.empty())
    throw std::invalid_argument("sample_bid_pair: empty list");
  const double a = dist.first_list[rng.uniform_index(dist.first_list.size())];
  const double b = dist.second_list[rng.uniform_index(dist.second_list.size())];
  return {std::max(a, b) / dist.max_value, std::min(a, b) / dist.max_value};
}

// Revenue of a second-price auction with reserve: zero if the reserve prices
// out the top bid, otherwise the larger of second bid and reserve.
inline double ssp_revenue(double reserve, double top_bid, double second_bid) {
  if (second_bid > top_bid) throw std::invalid_argument("ssp_revenue: W > X");
  if (second_bid < 0.0 || top_bid > 1.0)
    throw std::invalid_argument("ssp_revenue: bids outside [0, 1]");
  if (reserve < 0.0 || reserve > 1.0)
    throw std::invalid_argument("ssp_revenue: reserve outside [0, 1]");
  if (reserve > top_bid) return 0.0;
  return std::max(second_bid, reserve);
}

}  // namespace slatebandits
