#pragma once
// Concrete environment builders: the randomized uniform environments with the
// f1/f2/f3 reward functions, the two-slot monotonicity counterexample used as
// a test fixture, and the header-bidding reserve-price environment.
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slatebandits/auction.hpp"
#include "slatebandits/rng.hpp"
#include "slatebandits/slate.hpp"

namespace slatebandits {

enum class FVariant { F1, F2, F3 };

// f1 generalized to M slots: equally weighted maxes of consecutive pairs,
// (1/(M-1)) * sum_i max{Y_i, Y_{i+1}}.
inline SlateRewardFunction chain_pairwise_max(int M) {
  if (M < 2) throw std::invalid_argument("chain_pairwise_max: M < 2");
  std::vector<RewardTerm> terms;
  const double w = 1.0 / (M - 1);
  for (int i = 0; i + 1 < M; ++i) terms.push_back({w, {i, i + 1}});
  return SlateRewardFunction::convex_combination(M, std::move(terms));
}

// f2 generalized: a max over the leading pair, identities in the middle, and
// a max over the trailing pair, all equally weighted. For M = 3 the trailing
// pair collapses to the identity on the last slot.
inline SlateRewardFunction mixed_pairwise_max(int M) {
  if (M < 3) throw std::invalid_argument("mixed_pairwise_max: M < 3");
  std::vector<RewardTerm> terms;
  const double w = 1.0 / (M - 1);
  terms.push_back({w, {0, 1}});
  if (M == 3) {
    terms.push_back({w, {2}});
  } else {
    for (int i = 2; i + 1 < M; ++i) terms.push_back({w, {i}});
    terms.push_back({w, {M - 2, M - 1}});
  }
  return SlateRewardFunction::convex_combination(M, std::move(terms));
}

// f3 generalized: all pairwise maxes anchored on slot 1, equally weighted.
inline SlateRewardFunction anchored_pairwise_max(int M) {
  if (M < 2) throw std::invalid_argument("anchored_pairwise_max: M < 2");
  std::vector<RewardTerm> terms;
  const double w = 1.0 / (M - 1);
  for (int i = 1; i < M; ++i) terms.push_back({w, {0, i}});
  return SlateRewardFunction::convex_combination(M, std::move(terms));
}

// The three five-slot reward functions of the simulated experiments.
inline SlateRewardFunction make_f(FVariant variant, int M = 5) {
  if (M != 5) throw std::invalid_argument("make_f: f1/f2/f3 are defined for M = 5");
  switch (variant) {
    case FVariant::F1:
      return chain_pairwise_max(5);
    case FVariant::F2:
      return mixed_pairwise_max(5);
    case FVariant::F3:
      return anchored_pairwise_max(5);
  }
  throw std::logic_error("make_f: unknown variant");
}

// Randomized uniform environment: for every (slot, base action) pair
// independently, draw a ~ U[0.4, 0.6] and c ~ U[0.1, 0.3]; the slot reward is
// U[a - c, a + c]. All supports lie inside [0.1, 0.9].
inline EnvironmentSpec make_uniform_env(int M, int K, SlateRewardFunction f, Rng& rng) {
  if (M < 2 || K < 2) throw std::invalid_argument("make_uniform_env: need M >= 2, K >= 2");
  std::vector<std::vector<SlotDistribution>> dists;
  dists.reserve(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    std::vector<SlotDistribution> row;
    row.reserve(static_cast<std::size_t>(K));
    for (int b = 0; b < K; ++b) {
      const double a = rng.uniform(0.4, 0.6);
      const double c = rng.uniform(0.1, 0.3);
      row.push_back(SlotDistribution::uniform(a - c, a + c));
    }
    dists.push_back(std::move(row));
  }
  return EnvironmentSpec::make(M, K, std::move(dists), std::move(f));
}

// Two-slot fixture where slot-wise dominance of means does not carry over to
// the slate level: slot 2's lower-mean action d wins under f = max.
inline EnvironmentSpec make_example1_env() {
  std::vector<std::vector<SlotDistribution>> dists{
      {SlotDistribution::uniform(0.4, 0.5), SlotDistribution::uniform(0.0, 0.1)},
      {SlotDistribution::uniform(0.4, 0.5), SlotDistribution::uniform(0.15, 0.7)},
  };
  return EnvironmentSpec::make(2, 2, std::move(dists), SlateRewardFunction::max_of_all(2));
}

// K reserve prices equally spaced over [low, high].
struct ReservePriceGrid {
  int num_prices = 0;
  double low = 0.1;
  double high = 0.8;

  static ReservePriceGrid make(int K, double low = 0.1, double high = 0.8) {
    if (K < 2) throw std::invalid_argument("ReservePriceGrid: need K >= 2");
    if (!(0.0 <= low && low < high && high <= 1.0))
      throw std::invalid_argument("ReservePriceGrid: need 0 <= low < high <= 1");
    return {K, low, high};
  }

  double price(int action1) const {
    if (action1 < 1 || action1 > num_prices)
      throw std::invalid_argument("ReservePriceGrid: action out of range");
    return low + (high - low) * (action1 - 1) / (num_prices - 1);
  }

  std::vector<double> prices() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(num_prices));
    for (int a = 1; a <= num_prices; ++a) out.push_back(price(a));
    return out;
  }
};

// Header-bidding environment: slot i is SSP i, base action b is the b-th grid
// reserve, the slot reward is the SSP's auction revenue, and the slate reward
// is the maximum revenue over all SSPs.
inline EnvironmentSpec make_header_bidding_env(
    std::vector<std::shared_ptr<const BidDistribution>> bid_dists,
    const ReservePriceGrid& grid) {
  const int M = static_cast<int>(bid_dists.size());
  if (M < 1) throw std::invalid_argument("make_header_bidding_env: no SSPs");
  std::vector<std::vector<SlotDistribution>> dists;
  dists.reserve(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    if (!bid_dists[static_cast<std::size_t>(i)])
      throw std::invalid_argument("make_header_bidding_env: null bid distribution");
    std::vector<SlotDistribution> row;
    row.reserve(static_cast<std::size_t>(grid.num_prices));
    for (int a = 1; a <= grid.num_prices; ++a)
      row.push_back(SlotDistribution::auction(grid.price(a), bid_dists[static_cast<std::size_t>(i)]));
    dists.push_back(std::move(row));
  }
  return EnvironmentSpec::make(M, grid.num_prices, std::move(dists),
                               SlateRewardFunction::max_of_all(M));
}

// ---- Synthetic bid-value generators ----------------------------------------
// Stand-ins for bootstrapped auction logs: each exchange list is drawn from a
// weighted mixture of uniform bands and clipped lognormals.

struct BidComponentSpec {
  std::string type;  // "uniform" | "lognormal"
  double weight = 1.0;
  double lo = 0.0, hi = 1.0;              // uniform band
  double mu = 0.0, sigma = 1.0, clip = 1.0;  // lognormal parameters
};

struct BidGeneratorSpec {
  std::vector<BidComponentSpec> exchange1;
  std::vector<BidComponentSpec> exchange2;
  int list_size = 10000;
};

inline double draw_bid_component(const BidComponentSpec& c, Rng& rng) {
  if (c.type == "uniform") {
    if (!(0.0 < c.lo && c.lo <= c.hi))
      throw std::invalid_argument("bid generator: uniform band needs 0 < lo <= hi");
    return rng.uniform(c.lo, c.hi);
  }
  if (c.type == "lognormal") {
    if (!(c.clip > 0.0)) throw std::invalid_argument("bid generator: clip must be positive");
    const double raw = std::exp(c.mu + c.sigma * rng.normal());
    return std::min(raw, c.clip);
  }
  throw std::invalid_argument("bid generator: unknown component type '" + c.type + "'");
}

inline std::vector<double> draw_bid_list(const std::vector<BidComponentSpec>& components,
                                         int n, Rng& rng) {
  if (components.empty()) throw std::invalid_argument("bid generator: no components");
  if (n < 1) throw std::invalid_argument("bid generator: list size < 1");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0)) throw std::invalid_argument("bid generator: weight <= 0");
    total += c.weight;
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double pick = rng.uniform01() * total;
    const BidComponentSpec* chosen = &components.back();
    for (const auto& c : components) {
      if (pick < c.weight) {
        chosen = &c;
        break;
      }
      pick -= c.weight;
    }
    out.push_back(draw_bid_component(*chosen, rng));
  }
  return out;
}

inline BidDistribution realize_bid_distribution(const BidGeneratorSpec& spec, Rng& rng) {
  auto l1 = draw_bid_list(spec.exchange1, spec.list_size, rng);
  auto l2 = draw_bid_list(spec.exchange2, spec.list_size, rng);
  return BidDistribution::from_lists(std::move(l1), std::move(l2));
}

}  // namespace slatebandits
