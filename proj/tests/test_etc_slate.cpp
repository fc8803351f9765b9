#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "slatebandits/environments.hpp"
#include "slatebandits/etc_slate.hpp"
#include "slatebandits/oracle.hpp"

using namespace slatebandits;

namespace {

EnvironmentSpec point_env(const std::vector<std::vector<double>>& values,
                          SlateRewardFunction f) {
  std::vector<std::vector<SlotDistribution>> dists;
  for (const auto& row : values) {
    std::vector<SlotDistribution> drow;
    for (double v : row) drow.push_back(SlotDistribution::point_mass(v));
    dists.push_back(std::move(drow));
  }
  const int M = static_cast<int>(values.size());
  const int K = static_cast<int>(values[0].size());
  return EnvironmentSpec::make(M, K, std::move(dists), std::move(f));
}

}  // namespace

TEST_SUITE_BEGIN("etc-slate");

TEST_CASE("exploration budget matches the line-1 formula") {
  CHECK(exploration_budget(0.1, 0.001, 100) == 2303);
  CHECK(exploration_budget(std::sqrt(2.0), 1.0 / std::exp(1.0), 1) == 1);
  CHECK(exploration_budget(1.0, 0.5, 2) == 3);
  CHECK_THROWS_AS(exploration_budget(0.0, 0.5, 2), std::invalid_argument);
  CHECK_THROWS_AS(exploration_budget(-1.0, 0.5, 2), std::invalid_argument);
  CHECK_THROWS_AS(exploration_budget(1.0, 0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(exploration_budget(1.0, 1.0, 2), std::invalid_argument);
}

TEST_CASE("explore plays each diagonal slate exactly n_hat times") {
  const auto env = make_example1_env();
  Rng rng(5);
  // K=3 variant with a wider environment
  std::vector<std::vector<SlotDistribution>> dists(
      2, std::vector<SlotDistribution>(3, SlotDistribution::uniform(0.2, 0.8)));
  const auto env3 =
      EnvironmentSpec::make(2, 3, std::move(dists), SlateRewardFunction::max_of_all(2));
  const auto [store, trajectory] = explore(env3, 2, rng);
  CHECK(trajectory.size() == 6);
  std::map<std::string, int> plays;
  for (const auto& round : trajectory) plays[round.slate.to_string()]++;
  CHECK(plays.size() == 3);
  CHECK(plays.at("1-1") == 2);
  CHECK(plays.at("2-2") == 2);
  CHECK(plays.at("3-3") == 2);
  CHECK(store.complete());
  CHECK(store.samples_per_action == 2);
  // Stored samples are the observed slot rewards, in play order.
  int idx = 0;
  for (int l = 1; l <= 3; ++l)
    for (int n = 0; n < 2; ++n, ++idx)
      for (int i = 0; i < 2; ++i)
        CHECK(store.at(i, l, n) ==
              trajectory[static_cast<std::size_t>(idx)].slot_rewards[static_cast<std::size_t>(i)]);
}

TEST_CASE("explore with a single action plays only the one diagonal") {
  std::vector<std::vector<SlotDistribution>> dists(
      2, std::vector<SlotDistribution>(1, SlotDistribution::point_mass(0.3)));
  const auto env =
      EnvironmentSpec::make(2, 1, std::move(dists), SlateRewardFunction::max_of_all(2));
  Rng rng(1);
  const auto [store, trajectory] = explore(env, 4, rng);
  CHECK(trajectory.size() == 4);
  for (const auto& round : trajectory) CHECK(round.slate == Slate({1, 1}));
  for (int n = 0; n < 4; ++n) CHECK(store.at(0, 1, n) == 0.3);
}

TEST_CASE("reconstruction pairs index-aligned samples") {
  // M=3, K=2: all 8 slates reconstructed from only the 2 diagonal slates.
  std::vector<std::vector<SlotDistribution>> dists(
      3, std::vector<SlotDistribution>(2, SlotDistribution::uniform(0.1, 0.9)));
  const auto env =
      EnvironmentSpec::make(3, 2, std::move(dists), SlateRewardFunction::max_of_all(3));
  Rng rng(17);
  const auto [store, trajectory] = explore(env, 5, rng);
  SlateEnumerator it(3, 2);
  Slate slate;
  int slates_seen = 0;
  while (it.next(slate)) {
    const auto samples = reconstruct_samples(store, slate, env.reward);
    REQUIRE(samples.size() == 5);
    for (std::size_t n = 0; n < samples.size(); ++n) {
      const std::vector<double> z{store.at(0, slate[0], static_cast<std::int64_t>(n)),
                                  store.at(1, slate[1], static_cast<std::int64_t>(n)),
                                  store.at(2, slate[2], static_cast<std::int64_t>(n))};
      CHECK(samples[n] == env.reward.evaluate(z));
      CHECK(samples[n] >= 0.0);
      CHECK(samples[n] <= 1.0);
    }
    ++slates_seen;
  }
  CHECK(slates_seen == 8);
}

TEST_CASE("reconstruction of a diagonal slate recovers the observed slate rewards") {
  const auto env = make_example1_env();
  Rng rng(23);
  const auto [store, trajectory] = explore(env, 6, rng);
  for (int l = 1; l <= 2; ++l) {
    const Slate diag({l, l});
    const auto samples = reconstruct_samples(store, diag, env.reward);
    int n = 0;
    for (const auto& round : trajectory)
      if (round.slate == diag) CHECK(samples[static_cast<std::size_t>(n++)] == round.slate_reward);
  }
}

TEST_CASE("reconstruction on point masses is the max of the masses") {
  const auto env = point_env({{0.2, 0.6}, {0.3, 0.1}}, SlateRewardFunction::max_of_all(2));
  Rng rng(2);
  const auto [store, trajectory] = explore(env, 3, rng);
  const auto samples = reconstruct_samples(store, Slate({2, 1}), env.reward);
  for (double s : samples) CHECK(s == 0.6);
}

TEST_CASE("reconstruction requires a complete store") {
  ExploreStore empty;
  CHECK_THROWS_AS(reconstruct_samples(empty, Slate({1}), SlateRewardFunction::max_of_all(1)),
                  std::invalid_argument);
}

TEST_CASE("select_best_slate breaks ties lexicographically") {
  // Slot 1 action 2 dominates; all slates with b1=2 tie at 0.9.
  const auto env = point_env({{0.1, 0.9}, {0.1, 0.1}, {0.1, 0.1}},
                             SlateRewardFunction::max_of_all(3));
  Rng rng(3);
  const auto [store, trajectory] = explore(env, 2, rng);
  CHECK(select_best_slate(store, env) == Slate({2, 1, 1}));
}

TEST_CASE("select_best_slate on a single-slate problem returns it") {
  const auto env = point_env({{0.4}, {0.7}}, SlateRewardFunction::max_of_all(2));
  Rng rng(4);
  const auto [store, trajectory] = explore(env, 1, rng);
  CHECK(select_best_slate(store, env) == Slate({1, 1}));
}

TEST_CASE("select_best_slate agrees with a brute-force scan of rescaled means") {
  std::vector<std::vector<SlotDistribution>> dists(
      2, std::vector<SlotDistribution>(3, SlotDistribution::uniform(0.1, 0.9)));
  const auto env =
      EnvironmentSpec::make(2, 3, std::move(dists), chain_pairwise_max(2));
  Rng rng(31);
  const auto [store, trajectory] = explore(env, 20, rng);
  const Slate chosen = select_best_slate(store, env);

  for (double scale : {1.0, 0.25, 7.5}) {
    SlateEnumerator it(2, 3);
    Slate slate, best;
    double best_mean = -1.0;
    while (it.next(slate)) {
      const auto samples = reconstruct_samples(store, slate, env.reward);
      double sum = 0.0;
      for (double s : samples) sum += s;
      const double scaled = scale * sum / static_cast<double>(samples.size());
      if (scaled > best_mean) {
        best_mean = scaled;
        best = slate;
      }
    }
    CHECK(best == chosen);  // argmax invariant under positive rescaling
  }
}

TEST_CASE("select_best_slate identifies the monotonicity counterexample optimum") {
  // With n_hat = 1e4, the empirical argmax is {a,d} in >= 99% of runs.
  const auto env = make_example1_env();
  int correct = 0;
  const int runs = 200;
  for (int r = 0; r < runs; ++r) {
    Rng rng(derive_seed(100, static_cast<std::uint64_t>(r)));
    const auto [store, trajectory] = explore(env, 10000, rng);
    if (select_best_slate(store, env) == Slate({1, 2})) ++correct;
  }
  CHECK(correct >= static_cast<int>(0.99 * runs));
}

TEST_CASE("run splits the horizon into explore and commit phases") {
  std::vector<std::vector<SlotDistribution>> dists(
      2, std::vector<SlotDistribution>(2, SlotDistribution::uniform(0.2, 0.8)));
  const auto env =
      EnvironmentSpec::make(2, 2, std::move(dists), SlateRewardFunction::max_of_all(2));
  // kappa/gamma chosen so N-hat = 2: need 2/k^2 (ln4 - ln g) in (1, 2].
  EtcConfig config;
  config.horizon = 10;
  config.kappa = std::sqrt(2.0);
  config.gamma = 4.0 / std::exp(2.0);  // ln4 - ln gamma = 2 -> N-hat = 2
  Rng rng(8);
  const auto result = run_etc_slate(env, config, rng);
  CHECK(result.samples_per_action == 2);
  CHECK(result.explore_rounds == 4);
  CHECK_FALSE(result.truncated);
  REQUIRE(result.trajectory.size() == 10);
  for (std::size_t t = 4; t < 10; ++t)
    CHECK(result.trajectory[t].slate == result.chosen_slate);
}

TEST_CASE("run commits to the true argmax under point masses") {
  const auto env = point_env({{0.2, 0.7}, {0.4, 0.3}}, SlateRewardFunction::max_of_all(2));
  EtcConfig config;
  config.horizon = 50;
  config.kappa = 1.0;
  config.gamma = 0.5;
  Rng rng(12);
  const auto result = run_etc_slate(env, config, rng);
  CHECK(result.chosen_slate == Slate({2, 1}));
  CHECK(result.trajectory.size() == 50);
}

TEST_CASE("run truncates exploration when K * N-hat exceeds the horizon") {
  const auto env = point_env({{0.2, 0.7}, {0.4, 0.3}}, SlateRewardFunction::max_of_all(2));
  EtcConfig config;
  config.horizon = 9;
  config.kappa = 0.05;  // enormous nominal budget
  config.gamma = 0.01;
  Rng rng(6);
  const auto result = run_etc_slate(env, config, rng);
  CHECK(result.truncated);
  CHECK(result.samples_per_action == 4);  // floor(9 / 2)
  CHECK(result.explore_rounds == 8);
  CHECK(result.trajectory.size() == 9);
  CHECK(result.trajectory.back().slate == result.chosen_slate);

  config.horizon = 1;  // cannot even play each diagonal once
  Rng rng2(6);
  CHECK_THROWS_AS(run_etc_slate(env, config, rng2), std::invalid_argument);
}

TEST_CASE("exploration plays exactly K distinct slates for K * N-hat rounds") {
  std::vector<std::vector<SlotDistribution>> dists(
      3, std::vector<SlotDistribution>(4, SlotDistribution::uniform(0.1, 0.9)));
  const auto env =
      EnvironmentSpec::make(3, 4, std::move(dists), chain_pairwise_max(3));
  EtcConfig config;
  config.horizon = 500;
  config.kappa = 0.8;
  config.gamma = 0.2;
  Rng rng(19);
  const auto result = run_etc_slate(env, config, rng);
  const auto n_hat = exploration_budget(config.kappa, config.gamma, 64);
  CHECK(result.explore_rounds == 4 * n_hat);
  std::set<std::string> explored;
  for (std::int64_t t = 0; t < result.explore_rounds; ++t)
    explored.insert(result.trajectory[static_cast<std::size_t>(t)].slate.to_string());
  CHECK(explored.size() == 4);  // K diagonals, never N-hat * K^M rounds
}

TEST_CASE("reconstructed samples are distributed like direct slate rewards") {
  // Two-point slots, f = max: exact pmf by brute force over the product
  // support; empirical pmf of the reconstruction within total variation 0.05.
  std::vector<std::vector<SlotDistribution>> dists{
      {SlotDistribution::discrete({0.2, 0.8}, {0.6, 0.4}),
       SlotDistribution::discrete({0.4, 1.0}, {0.5, 0.5})},
      {SlotDistribution::discrete({0.0, 0.6}, {0.3, 0.7}),
       SlotDistribution::discrete({0.3, 0.9}, {0.8, 0.2})}};
  const auto env =
      EnvironmentSpec::make(2, 2, std::move(dists), SlateRewardFunction::max_of_all(2));
  Rng rng(41);
  const std::int64_t n_hat = 4000;
  const auto [store, trajectory] = explore(env, n_hat, rng);
  SlateEnumerator it(2, 2);
  Slate slate;
  while (it.next(slate)) {
    const auto& d1 = env.dist(0, slate[0]);
    const auto& d2 = env.dist(1, slate[1]);
    std::map<double, double> exact;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        exact[std::max(d1.values()[i], d2.values()[j])] += d1.probs()[i] * d2.probs()[j];
    std::map<double, double> empirical;
    for (double v : reconstruct_samples(store, slate, env.reward))
      empirical[v] += 1.0 / static_cast<double>(n_hat);
    double tv = 0.0;
    for (const auto& [v, p] : exact) tv += std::abs(p - empirical[v]);
    CHECK(0.5 * tv <= 0.05);
  }
}

TEST_CASE("misidentification rate respects the Hoeffding-union guarantee") {
  // Noisy discrete instance with a known gap; run with kappa = delta_min.
  std::vector<std::vector<SlotDistribution>> dists;
  dists.push_back({SlotDistribution::discrete({0.3, 0.7}, {0.5, 0.5}),
                   SlotDistribution::discrete({0.2, 0.6}, {0.5, 0.5})});
  dists.push_back({SlotDistribution::discrete({0.35, 0.65}, {0.5, 0.5}),
                   SlotDistribution::discrete({0.2, 0.5}, {0.5, 0.5})});
  const auto noisy =
      EnvironmentSpec::make(2, 2, std::move(dists), SlateRewardFunction::max_of_all(2));
  const auto table = build_mean_table_exact(noisy);
  REQUIRE(table.delta_min > 0.0);

  const double gamma = 0.2;
  const auto n_hat = exploration_budget(table.delta_min, gamma, 4);
  const int runs = 400;
  int wrong = 0;
  for (int r = 0; r < runs; ++r) {
    Rng rng(derive_seed(2024, static_cast<std::uint64_t>(r)));
    const auto [store, trajectory] = explore(noisy, n_hat, rng);
    if (!(select_best_slate(store, noisy) == table.best_slate)) ++wrong;
  }
  const double rate = static_cast<double>(wrong) / runs;
  CHECK(rate <= gamma + 3.0 * std::sqrt(gamma * (1.0 - gamma) / runs));
}

TEST_CASE("problem-dependent tuning substitutes directly") {
  auto p = tune_problem_dependent(100, 0.1, 1.0);
  CHECK(p.kappa == doctest::Approx(0.1));
  CHECK(p.gamma == doctest::Approx(0.01));
  p = tune_problem_dependent(1000000, 0.05, 2.0);
  CHECK(p.kappa == doctest::Approx(0.05));
  CHECK(p.gamma == doctest::Approx(1e-12));
  CHECK_THROWS_AS(tune_problem_dependent(100, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(tune_problem_dependent(100, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("problem-independent tuning matches direct evaluation") {
  // Frozen from independent evaluation of T^(-1/3) sqrt(K) sqrt(ln T) sqrt(1+m).
  auto p = tune_problem_independent(1000, 10, 1.0);
  CHECK(p.kappa == doctest::Approx(1.1753940002384).epsilon(1e-9));
  CHECK(p.gamma == doctest::Approx(0.001));
  p = tune_problem_independent(8, 1, 1.0);
  CHECK(p.kappa == doctest::Approx(1.019666990168809).epsilon(1e-9));
  CHECK(tune_problem_independent(100, 4, 1.0).gamma == doctest::Approx(0.01));
  CHECK_THROWS_AS(tune_problem_independent(1, 10, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(tune_problem_independent(1000, 10, 0.0), std::invalid_argument);
}

TEST_CASE("regret bound matches direct evaluation") {
  CHECK(evaluate_regret_bound(1000, 10) == doctest::Approx(1376.3940002383993).epsilon(1e-9));
  CHECK_THROWS_AS(evaluate_regret_bound(1, 10), std::invalid_argument);
  // K = 1 and T = e^2: log collapses to 2, bound = T^(2/3) * 4 + 1.
  const auto T = static_cast<std::int64_t>(std::round(std::exp(2.0)));
  const double t = static_cast<double>(T);
  CHECK(evaluate_regret_bound(T, 1) ==
        doctest::Approx(std::pow(t, 2.0 / 3.0) * (2.0 + std::sqrt(2.0 * std::log(t))) + 1.0));
}

TEST_SUITE_END();
