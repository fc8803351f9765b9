#pragma once
// Core domain types for slate bandits: slates, slot-level reward
// distributions, slate-level reward functions, environments, and the
// environment stepping contract shared by every algorithm.
//
// Conventions: base actions are 1-indexed ({1, ..., K}) at every interface;
// slot positions are 0-indexed in code. All slot and slate rewards lie in
// [0, 1].
#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slatebandits/auction.hpp"
#include "slatebandits/rng.hpp"

namespace slatebandits {

// A slate: one base action per slot.
struct Slate {
  std::vector<int> actions;

  Slate() = default;
  explicit Slate(std::vector<int> a) : actions(std::move(a)) {}

  int size() const { return static_cast<int>(actions.size()); }
  int operator[](int slot) const { return actions[static_cast<std::size_t>(slot)]; }

  bool operator==(const Slate&) const = default;
  auto operator<=>(const Slate&) const = default;  // lexicographic

  std::string to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < actions.size(); ++i) {
      if (i > 0) out << '-';
      out << actions[i];
    }
    return out.str();
  }
};

// Marginal reward distribution of one (slot, base action) pair.
class SlotDistribution {
 public:
  enum class Kind { Uniform, Discrete, Auction };

  static SlotDistribution uniform(double lo, double hi) {
    if (!(0.0 <= lo && lo <= hi && hi <= 1.0))
      throw std::invalid_argument("SlotDistribution::uniform: need 0 <= lo <= hi <= 1");
    SlotDistribution d;
    d.kind_ = Kind::Uniform;
    d.lo_ = lo;
    d.hi_ = hi;
    return d;
  }

  static SlotDistribution point_mass(double v) { return uniform(v, v); }

  static SlotDistribution discrete(std::vector<double> values, std::vector<double> probs) {
    if (values.empty() || values.size() != probs.size())
      throw std::invalid_argument("SlotDistribution::discrete: bad atom lists");
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] < 0.0 || values[i] > 1.0)
        throw std::invalid_argument("SlotDistribution::discrete: atom outside [0, 1]");
      if (probs[i] < 0.0)
        throw std::invalid_argument("SlotDistribution::discrete: negative probability");
      total += probs[i];
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("SlotDistribution::discrete: probabilities must sum to 1");
    SlotDistribution d;
    d.kind_ = Kind::Discrete;
    d.values_ = std::move(values);
    d.probs_ = std::move(probs);
    d.cum_.resize(d.probs_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < d.probs_.size(); ++i) {
      acc += d.probs_[i];
      d.cum_[i] = acc;
    }
    d.cum_.back() = 1.0;
    return d;
  }

  static SlotDistribution auction(double reserve, std::shared_ptr<const BidDistribution> bids) {
    if (!bids) throw std::invalid_argument("SlotDistribution::auction: null bid distribution");
    if (reserve < 0.0 || reserve > 1.0)
      throw std::invalid_argument("SlotDistribution::auction: reserve outside [0, 1]");
    SlotDistribution d;
    d.kind_ = Kind::Auction;
    d.reserve_ = reserve;
    d.bids_ = std::move(bids);
    return d;
  }

  Kind kind() const { return kind_; }
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  double reserve() const { return reserve_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }
  const BidDistribution& bids() const { return *bids_; }

  double sample(Rng& rng) const {
    switch (kind_) {
      case Kind::Uniform:
        return rng.uniform(lo_, hi_);
      case Kind::Discrete: {
        const double u = rng.uniform01();
        for (std::size_t i = 0; i < cum_.size(); ++i)
          if (u < cum_[i]) return values_[i];
        return values_.back();
      }
      case Kind::Auction: {
        const auto [x, w] = sample_bid_pair(*bids_, rng);
        return ssp_revenue(reserve_, x, w);
      }
    }
    throw std::logic_error("SlotDistribution: unknown kind");
  }

  bool has_exact_mean() const { return kind_ != Kind::Auction; }

  double exact_mean() const {
    switch (kind_) {
      case Kind::Uniform:
        return 0.5 * (lo_ + hi_);
      case Kind::Discrete: {
        double m = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) m += values_[i] * probs_[i];
        return m;
      }
      case Kind::Auction:
        throw std::domain_error("SlotDistribution: auction mean is not closed-form");
    }
    throw std::logic_error("SlotDistribution: unknown kind");
  }

 private:
  Kind kind_ = Kind::Uniform;
  double lo_ = 0.0, hi_ = 0.0;
  double reserve_ = 0.0;
  std::shared_ptr<const BidDistribution> bids_;
  std::vector<double> values_, probs_, cum_;
};

// One term of a slate-level reward function: weight * max over a slot subset.
// A singleton subset is an identity term.
struct RewardTerm {
  double weight = 0.0;
  std::vector<int> slots;  // 0-based slot indices
};

// Slate-level reward function f: [0,1]^M -> [0,1]. The primary representation
// is a convex combination of maxes over slot subsets, a closed algebra the
// exact-mean oracle can pattern-match. An opaque callable variant is also
// supported; it only admits Monte-Carlo oracles.
class SlateRewardFunction {
 public:
  SlateRewardFunction() = default;

  static SlateRewardFunction convex_combination(int num_slots, std::vector<RewardTerm> terms) {
    if (num_slots < 1) throw std::invalid_argument("reward function: num_slots < 1");
    if (terms.empty()) throw std::invalid_argument("reward function: no terms");
    double total = 0.0;
    for (const auto& term : terms) {
      if (!(term.weight > 0.0)) throw std::invalid_argument("reward function: weight <= 0");
      if (term.slots.empty()) throw std::invalid_argument("reward function: empty slot set");
      std::vector<int> seen;
      for (int s : term.slots) {
        if (s < 0 || s >= num_slots)
          throw std::invalid_argument("reward function: slot index out of range");
        if (std::find(seen.begin(), seen.end(), s) != seen.end())
          throw std::invalid_argument("reward function: duplicate slot in term");
        seen.push_back(s);
      }
      total += term.weight;
    }
    if (total > 1.0 + 1e-9)
      throw std::invalid_argument("reward function: weights exceed 1");
    SlateRewardFunction f;
    f.num_slots_ = num_slots;
    f.algebra_ = true;
    f.terms_ = std::move(terms);
    return f;
  }

  static SlateRewardFunction max_of_all(int num_slots) {
    std::vector<int> all(static_cast<std::size_t>(num_slots));
    for (int i = 0; i < num_slots; ++i) all[static_cast<std::size_t>(i)] = i;
    return convex_combination(num_slots, {{1.0, std::move(all)}});
  }

  static SlateRewardFunction average_of_all(int num_slots) {
    std::vector<RewardTerm> terms;
    for (int i = 0; i < num_slots; ++i)
      terms.push_back({1.0 / num_slots, {i}});
    return convex_combination(num_slots, std::move(terms));
  }

  static SlateRewardFunction opaque(int num_slots,
                                    std::function<double(std::span<const double>)> fn) {
    if (num_slots < 1) throw std::invalid_argument("reward function: num_slots < 1");
    if (!fn) throw std::invalid_argument("reward function: null callable");
    SlateRewardFunction f;
    f.num_slots_ = num_slots;
    f.algebra_ = false;
    f.fn_ = std::move(fn);
    return f;
  }

  int num_slots() const { return num_slots_; }
  bool is_algebra() const { return algebra_; }
  const std::vector<RewardTerm>& terms() const {
    if (!algebra_) throw std::domain_error("reward function: opaque variant has no terms");
    return terms_;
  }

  double evaluate(std::span<const double> slot_rewards) const {
    if (static_cast<int>(slot_rewards.size()) != num_slots_)
      throw std::invalid_argument("reward function: slot reward length mismatch");
    for (double r : slot_rewards)
      if (!(r >= 0.0 && r <= 1.0))
        throw std::invalid_argument("reward function: slot reward outside [0, 1]");
    return evaluate_unchecked(slot_rewards);
  }

  double evaluate_unchecked(std::span<const double> slot_rewards) const {
    if (!algebra_) {
      const double v = fn_(slot_rewards);
      if (!(v >= 0.0 && v <= 1.0))
        throw std::domain_error("reward function: opaque output outside [0, 1]");
      return v;
    }
    double total = 0.0;
    for (const auto& term : terms_) {
      double best = 0.0;
      for (int s : term.slots)
        best = std::max(best, slot_rewards[static_cast<std::size_t>(s)]);
      total += term.weight * best;
    }
    return total;
  }

 private:
  int num_slots_ = 0;
  bool algebra_ = true;
  std::vector<RewardTerm> terms_;
  std::function<double(std::span<const double>)> fn_;
};

inline double evaluate_reward_function(const SlateRewardFunction& f,
                                       std::span<const double> slot_rewards) {
  return f.evaluate(slot_rewards);
}

// Environment: M slots, K base actions per slot, an M x K grid of slot
// distributions, and the (known) slate-level reward function.
struct EnvironmentSpec {
  int num_slots = 0;    // M
  int num_actions = 0;  // K
  std::vector<std::vector<SlotDistribution>> slot_dists;  // [slot][action-1]
  SlateRewardFunction reward;

  static EnvironmentSpec make(int M, int K,
                              std::vector<std::vector<SlotDistribution>> dists,
                              SlateRewardFunction f) {
    if (M < 1 || K < 1) throw std::invalid_argument("EnvironmentSpec: M, K must be >= 1");
    if (static_cast<int>(dists.size()) != M)
      throw std::invalid_argument("EnvironmentSpec: slot distribution rows != M");
    for (const auto& row : dists)
      if (static_cast<int>(row.size()) != K)
        throw std::invalid_argument("EnvironmentSpec: slot distribution cols != K");
    if (f.num_slots() != M)
      throw std::invalid_argument("EnvironmentSpec: reward function arity != M");
    EnvironmentSpec env;
    env.num_slots = M;
    env.num_actions = K;
    env.slot_dists = std::move(dists);
    env.reward = std::move(f);
    return env;
  }

  const SlotDistribution& dist(int slot, int action1) const {
    return slot_dists[static_cast<std::size_t>(slot)][static_cast<std::size_t>(action1 - 1)];
  }

  void check_slate(const Slate& slate) const {
    if (slate.size() != num_slots)
      throw std::invalid_argument("slate length != number of slots");
    for (int a : slate.actions)
      if (a < 1 || a > num_actions)
        throw std::invalid_argument("slate action outside {1, ..., K}");
  }

  // The slate bandit problem proper requires M > 1 and K >= 2; degenerate
  // sizes remain constructible for algorithm-level tests.
  bool is_proper_problem() const { return num_slots > 1 && num_actions >= 2; }
};

// Record of one online round.
struct RoundOutcome {
  Slate slate;
  std::vector<double> slot_rewards;
  double slate_reward = 0.0;
};

using Trajectory = std::vector<RoundOutcome>;

// One round of the online protocol: draw every slot reward independently,
// then apply the slate-level reward function.
inline RoundOutcome step(const EnvironmentSpec& env, const Slate& slate, Rng& rng) {
  env.check_slate(slate);
  RoundOutcome out;
  out.slate = slate;
  out.slot_rewards.resize(static_cast<std::size_t>(env.num_slots));
  for (int i = 0; i < env.num_slots; ++i)
    out.slot_rewards[static_cast<std::size_t>(i)] = env.dist(i, slate[i]).sample(rng);
  out.slate_reward = env.reward.evaluate(out.slot_rewards);
  return out;
}

inline std::uint64_t checked_slate_count(int M, int K) {
  if (M < 1 || K < 1) throw std::invalid_argument("slate count: M, K must be >= 1");
  std::uint64_t count = 1;
  const std::uint64_t limit = std::uint64_t{1} << 62;
  for (int i = 0; i < M; ++i) {
    if (count > limit / static_cast<std::uint64_t>(K))
      throw std::overflow_error("slate count K^M overflows");
    count *= static_cast<std::uint64_t>(K);
  }
  return count;
}

// Streams all K^M slates in ascending lexicographic (mixed-radix) order
// without materializing them.
class SlateEnumerator {
 public:
  SlateEnumerator(int M, int K)
      : M_(M), K_(K), count_(checked_slate_count(M, K)), emitted_(0) {
    current_.actions.assign(static_cast<std::size_t>(M), 1);
  }

  std::uint64_t count() const { return count_; }

  // Yields the next slate; returns false once all K^M have been produced.
  bool next(Slate& out) {
    if (emitted_ == count_) return false;
    if (emitted_ > 0) {
      for (int i = M_ - 1; i >= 0; --i) {
        auto& a = current_.actions[static_cast<std::size_t>(i)];
        if (a < K_) {
          ++a;
          break;
        }
        a = 1;
      }
    }
    ++emitted_;
    out = current_;
    return true;
  }

  void reset() {
    emitted_ = 0;
    current_.actions.assign(static_cast<std::size_t>(M_), 1);
  }

  static std::uint64_t index_of(const Slate& slate, int K) {
    std::uint64_t idx = 0;
    for (int a : slate.actions) idx = idx * static_cast<std::uint64_t>(K) +
                                      static_cast<std::uint64_t>(a - 1);
    return idx;
  }

  static Slate slate_at(int M, int K, std::uint64_t index) {
    Slate s;
    s.actions.assign(static_cast<std::size_t>(M), 1);
    for (int i = M - 1; i >= 0; --i) {
      s.actions[static_cast<std::size_t>(i)] =
          static_cast<int>(index % static_cast<std::uint64_t>(K)) + 1;
      index /= static_cast<std::uint64_t>(K);
    }
    return s;
  }

 private:
  int M_, K_;
  std::uint64_t count_, emitted_;
  Slate current_;
};

}  // namespace slatebandits
