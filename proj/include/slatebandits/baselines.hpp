#pragma once
// Benchmark strategies: an independent standard bandit per slot (UCB1 or
// Thompson sampling on the slot-level rewards), whose chosen base actions are
// combined into the played slate each round. No cross-slot information flows
// between the slot bandits.
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "slatebandits/rng.hpp"
#include "slatebandits/slate.hpp"

namespace slatebandits {

enum class SlotAlgo { Ucb1, ThompsonSampling };

struct SlotBanditState {
  SlotAlgo algo = SlotAlgo::Ucb1;
  int num_actions = 0;
  std::int64_t rounds = 0;  // completed updates
  std::vector<std::int64_t> pulls;
  std::vector<double> reward_sums;
  std::vector<double> alpha, beta;  // Beta(1, 1) priors

  static SlotBanditState make(SlotAlgo algo, int num_actions) {
    if (num_actions < 1) throw std::invalid_argument("SlotBanditState: num_actions < 1");
    SlotBanditState s;
    s.algo = algo;
    s.num_actions = num_actions;
    s.pulls.assign(static_cast<std::size_t>(num_actions), 0);
    s.reward_sums.assign(static_cast<std::size_t>(num_actions), 0.0);
    s.alpha.assign(static_cast<std::size_t>(num_actions), 1.0);
    s.beta.assign(static_cast<std::size_t>(num_actions), 1.0);
    return s;
  }
};

// UCB1 with the classical sqrt(2 ln t / n) bonus. Arms not yet pulled are
// played first, in index order (warm-up); ties go to the lowest index.
inline int ucb1_select(const SlotBanditState& state) {
  for (int a = 0; a < state.num_actions; ++a)
    if (state.pulls[static_cast<std::size_t>(a)] == 0) return a + 1;
  int best = 1;
  double best_index = -1.0;
  for (int a = 0; a < state.num_actions; ++a) {
    const auto n = static_cast<double>(state.pulls[static_cast<std::size_t>(a)]);
    const double mean = state.reward_sums[static_cast<std::size_t>(a)] / n;
    const double bonus =
        std::sqrt(2.0 * std::log(static_cast<double>(state.rounds)) / n);
    const double index = mean + bonus;
    if (index > best_index) {
      best_index = index;
      best = a + 1;
    }
  }
  return best;
}

// Thompson sampling: draw one posterior sample per arm, play the argmax.
inline int ts_select(const SlotBanditState& state, Rng& rng) {
  int best = 1;
  double best_theta = -1.0;
  for (int a = 0; a < state.num_actions; ++a) {
    const double theta = rng.beta(state.alpha[static_cast<std::size_t>(a)],
                                  state.beta[static_cast<std::size_t>(a)]);
    if (theta > best_theta) {
      best_theta = theta;
      best = a + 1;
    }
  }
  return best;
}

// Record a slot-level reward. TS applies the Bernoulli trick for [0, 1]
// rewards: success with probability equal to the reward.
inline void slot_update(SlotBanditState& state, int action1, double reward, Rng& rng) {
  if (action1 < 1 || action1 > state.num_actions)
    throw std::invalid_argument("slot_update: action out of range");
  if (!(reward >= 0.0 && reward <= 1.0))
    throw std::invalid_argument("slot_update: reward outside [0, 1]");
  const auto a = static_cast<std::size_t>(action1 - 1);
  state.pulls[a] += 1;
  state.reward_sums[a] += reward;
  state.rounds += 1;
  if (state.algo == SlotAlgo::ThompsonSampling) {
    if (rng.bernoulli(reward))
      state.alpha[a] += 1.0;
    else
      state.beta[a] += 1.0;
  }
}

// Each round, every slot bandit picks its base action from its own history,
// the combined slate is played, and each bandit is updated with its own
// observed slot reward (semi-bandit feedback).
inline Trajectory run_per_slot_baseline(const EnvironmentSpec& env, SlotAlgo algo,
                                        std::int64_t horizon, Rng& rng) {
  if (horizon < 1) throw std::invalid_argument("run_per_slot_baseline: horizon < 1");
  std::vector<SlotBanditState> slots;
  slots.reserve(static_cast<std::size_t>(env.num_slots));
  for (int i = 0; i < env.num_slots; ++i)
    slots.push_back(SlotBanditState::make(algo, env.num_actions));
  Trajectory trajectory;
  trajectory.reserve(static_cast<std::size_t>(horizon));
  Slate slate(std::vector<int>(static_cast<std::size_t>(env.num_slots), 1));
  for (std::int64_t t = 0; t < horizon; ++t) {
    for (int i = 0; i < env.num_slots; ++i) {
      auto& s = slots[static_cast<std::size_t>(i)];
      slate.actions[static_cast<std::size_t>(i)] =
          algo == SlotAlgo::Ucb1 ? ucb1_select(s) : ts_select(s, rng);
    }
    RoundOutcome outcome = step(env, slate, rng);
    for (int i = 0; i < env.num_slots; ++i)
      slot_update(slots[static_cast<std::size_t>(i)], slate[i],
                  outcome.slot_rewards[static_cast<std::size_t>(i)], rng);
    trajectory.push_back(std::move(outcome));
  }
  return trajectory;
}

}  // namespace slatebandits
