#pragma once
// ETC-SLATE: explore the K diagonal slates (l, ..., l), reconstruct i.i.d.
// slate-reward samples for every slate in B from the stored slot rewards,
// commit to the empirical argmax for the rest of the horizon.
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "slatebandits/rng.hpp"
#include "slatebandits/slate.hpp"

namespace slatebandits {

struct EtcConfig {
  std::int64_t horizon = 0;  // T
  double kappa = 0.0;
  double gamma = 0.0;
  double m = 1.0;  // exponent used by the tuning presets; not read by run itself

  void validate() const {
    if (horizon < 1) throw std::invalid_argument("EtcConfig: horizon < 1");
    if (!(kappa > 0.0)) throw std::invalid_argument("EtcConfig: kappa <= 0");
    if (!(gamma > 0.0 && gamma < 1.0))
      throw std::invalid_argument("EtcConfig: gamma outside (0, 1)");
  }
};

// Per-(slot, base action) slot-reward samples gathered during exploration.
// Sample n of action l at slot i is the slot-i reward observed the n-th time
// the diagonal slate (l, ..., l) was played.
struct ExploreStore {
  int num_slots = 0;
  int num_actions = 0;
  std::int64_t samples_per_action = 0;  // N-hat
  std::vector<double> samples;          // [slot][action-1][n], flattened

  double at(int slot, int action1, std::int64_t n) const {
    return samples[(static_cast<std::size_t>(slot) * num_actions + (action1 - 1)) *
                       static_cast<std::size_t>(samples_per_action) +
                   static_cast<std::size_t>(n)];
  }

  bool complete() const {
    return samples_per_action > 0 &&
           samples.size() == static_cast<std::size_t>(num_slots) * num_actions *
                                 static_cast<std::size_t>(samples_per_action);
  }
};

struct EtcResult {
  Slate chosen_slate;
  Trajectory trajectory;
  std::int64_t explore_rounds = 0;       // N = K * samples_per_action
  std::int64_t samples_per_action = 0;   // N-hat actually used
  bool truncated = false;                // true when K * N-hat exceeded T
};

// N-hat = ceil((2 / kappa^2) * (ln|B| - ln gamma)), natural logarithms.
inline std::int64_t exploration_budget(double kappa, double gamma,
                                       std::uint64_t slate_count) {
  if (!(kappa > 0.0)) throw std::invalid_argument("exploration_budget: kappa <= 0");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("exploration_budget: gamma outside (0, 1)");
  if (slate_count < 1) throw std::invalid_argument("exploration_budget: empty action set");
  const double value = 2.0 / (kappa * kappa) *
                       (std::log(static_cast<double>(slate_count)) - std::log(gamma));
  if (!(value < 9.0e18)) throw std::overflow_error("exploration_budget: N-hat overflows");
  return static_cast<std::int64_t>(std::ceil(value));
}

// Play each diagonal slate (l, ..., l) exactly n_hat times, storing every
// observed slot reward.
inline std::pair<ExploreStore, Trajectory> explore(const EnvironmentSpec& env,
                                                   std::int64_t n_hat, Rng& rng) {
  if (n_hat < 1) throw std::invalid_argument("explore: n_hat < 1");
  ExploreStore store;
  store.num_slots = env.num_slots;
  store.num_actions = env.num_actions;
  store.samples_per_action = n_hat;
  store.samples.resize(static_cast<std::size_t>(env.num_slots) * env.num_actions *
                       static_cast<std::size_t>(n_hat));
  Trajectory trajectory;
  trajectory.reserve(static_cast<std::size_t>(env.num_actions) * static_cast<std::size_t>(n_hat));
  for (int l = 1; l <= env.num_actions; ++l) {
    const Slate diagonal(std::vector<int>(static_cast<std::size_t>(env.num_slots), l));
    for (std::int64_t n = 0; n < n_hat; ++n) {
      RoundOutcome outcome = step(env, diagonal, rng);
      for (int i = 0; i < env.num_slots; ++i)
        store.samples[(static_cast<std::size_t>(i) * env.num_actions + (l - 1)) *
                          static_cast<std::size_t>(n_hat) +
                      static_cast<std::size_t>(n)] =
            outcome.slot_rewards[static_cast<std::size_t>(i)];
      trajectory.push_back(std::move(outcome));
    }
  }
  return {std::move(store), std::move(trajectory)};
}

// Artificial i.i.d. slate-reward samples for an arbitrary slate b: sample n
// combines the n-th stored slot reward of each slot's chosen action,
// index-aligned, with no resampling across indices.
inline std::vector<double> reconstruct_samples(const ExploreStore& store, const Slate& slate,
                                               const SlateRewardFunction& f) {
  if (!store.complete()) throw std::invalid_argument("reconstruct_samples: store incomplete");
  if (slate.size() != store.num_slots)
    throw std::invalid_argument("reconstruct_samples: slate length mismatch");
  for (int a : slate.actions)
    if (a < 1 || a > store.num_actions)
      throw std::invalid_argument("reconstruct_samples: slate action out of range");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(store.samples_per_action));
  std::vector<double> z(static_cast<std::size_t>(store.num_slots));
  for (std::int64_t n = 0; n < store.samples_per_action; ++n) {
    for (int i = 0; i < store.num_slots; ++i)
      z[static_cast<std::size_t>(i)] = store.at(i, slate[i], n);
    out.push_back(f.evaluate(z));
  }
  return out;
}

// Streaming argmax of the reconstructed empirical means over all K^M slates;
// one slate's samples are materialized at a time. Ties break to the
// lexicographically smallest slate.
inline Slate select_best_slate(const ExploreStore& store, const EnvironmentSpec& env) {
  if (!store.complete()) throw std::invalid_argument("select_best_slate: store incomplete");
  if (store.num_slots != env.num_slots || store.num_actions != env.num_actions)
    throw std::invalid_argument("select_best_slate: store does not match environment");
  SlateEnumerator it(env.num_slots, env.num_actions);
  Slate slate;
  Slate best;
  double best_mean = -1.0;
  std::vector<double> z(static_cast<std::size_t>(env.num_slots));
  while (it.next(slate)) {
    double sum = 0.0;
    for (std::int64_t n = 0; n < store.samples_per_action; ++n) {
      for (int i = 0; i < env.num_slots; ++i)
        z[static_cast<std::size_t>(i)] = store.at(i, slate[i], n);
      sum += env.reward.evaluate_unchecked(z);
    }
    const double mean = sum / static_cast<double>(store.samples_per_action);
    if (mean > best_mean) {
      best_mean = mean;
      best = slate;
    }
  }
  return best;
}

// Full ETC-SLATE run over a horizon of exactly T rounds. If the nominal
// exploration phase K * N-hat exceeds T, exploration is truncated to
// floor(T / K) plays per diagonal slate and the result is flagged.
inline EtcResult run_etc_slate(const EnvironmentSpec& env, const EtcConfig& config, Rng& rng) {
  config.validate();
  const std::uint64_t slate_count = checked_slate_count(env.num_slots, env.num_actions);
  std::int64_t n_hat = exploration_budget(config.kappa, config.gamma, slate_count);
  EtcResult result;
  if (n_hat > config.horizon / env.num_actions) {
    n_hat = config.horizon / env.num_actions;
    result.truncated = true;
    if (n_hat == 0)
      throw std::invalid_argument("run_etc_slate: horizon too short to explore each diagonal once");
  }
  auto [store, trajectory] = explore(env, n_hat, rng);
  result.chosen_slate = select_best_slate(store, env);
  result.samples_per_action = n_hat;
  result.explore_rounds = n_hat * env.num_actions;
  trajectory.reserve(static_cast<std::size_t>(config.horizon));
  for (std::int64_t t = result.explore_rounds; t < config.horizon; ++t)
    trajectory.push_back(step(env, result.chosen_slate, rng));
  result.trajectory = std::move(trajectory);
  return result;
}

struct TuningParams {
  double kappa = 0.0;
  double gamma = 0.0;
};

// Problem-dependent preset: kappa = delta_min (a lower bound on the true gap
// is acceptable), gamma = T^-m.
inline TuningParams tune_problem_dependent(std::int64_t T, double delta_min, double m) {
  if (T < 1) throw std::invalid_argument("tune_problem_dependent: T < 1");
  if (!(delta_min > 0.0)) throw std::invalid_argument("tune_problem_dependent: delta_min <= 0");
  if (!(m > 0.0)) throw std::invalid_argument("tune_problem_dependent: m <= 0");
  return {delta_min, std::pow(static_cast<double>(T), -m)};
}

// Problem-independent preset: kappa = T^(-1/3) sqrt(K) sqrt(ln T) sqrt(1+m),
// gamma = T^-m.
inline TuningParams tune_problem_independent(std::int64_t T, int K, double m) {
  if (T < 2) throw std::invalid_argument("tune_problem_independent: T < 2");
  if (K < 1) throw std::invalid_argument("tune_problem_independent: K < 1");
  if (!(m > 0.0)) throw std::invalid_argument("tune_problem_independent: m <= 0");
  const double t = static_cast<double>(T);
  const double kappa = std::pow(t, -1.0 / 3.0) * std::sqrt(static_cast<double>(K)) *
                       std::sqrt(std::log(t)) * std::sqrt(1.0 + m);
  return {kappa, std::pow(t, -m)};
}

// Problem-independent regret bound T^(2/3) (2 + sqrt(2 K ln T)) + 1, for
// comparison against measured regret.
inline double evaluate_regret_bound(std::int64_t T, int K) {
  if (T < 2) throw std::invalid_argument("evaluate_regret_bound: T < 2");
  if (K < 1) throw std::invalid_argument("evaluate_regret_bound: K < 1");
  const double t = static_cast<double>(T);
  return std::pow(t, 2.0 / 3.0) *
             (2.0 + std::sqrt(2.0 * static_cast<double>(K) * std::log(t))) +
         1.0;
}

}  // namespace slatebandits
