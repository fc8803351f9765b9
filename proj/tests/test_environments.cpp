#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "slatebandits/environments.hpp"
#include "slatebandits/oracle.hpp"

using namespace slatebandits;

TEST_SUITE_BEGIN("environments");

TEST_CASE("uniform environment supports stay inside [0.1, 0.9]") {
  Rng rng(21);
  const auto env = make_uniform_env(5, 10, make_f(FVariant::F1), rng);
  CHECK(env.num_slots == 5);
  CHECK(env.num_actions == 10);
  int pairs = 0;
  for (int i = 0; i < env.num_slots; ++i)
    for (int a = 1; a <= env.num_actions; ++a) {
      const auto& d = env.dist(i, a);
      CHECK(d.lower() >= 0.1);
      CHECK(d.upper() <= 0.9);
      CHECK(d.lower() < d.upper());
      ++pairs;
    }
  CHECK(pairs == 50);
}

TEST_CASE("uniform environment is reproducible from its seed") {
  Rng a(5), b(5);
  const auto env_a = make_uniform_env(3, 4, chain_pairwise_max(3), a);
  const auto env_b = make_uniform_env(3, 4, chain_pairwise_max(3), b);
  for (int i = 0; i < 3; ++i)
    for (int k = 1; k <= 4; ++k) {
      CHECK(env_a.dist(i, k).lower() == env_b.dist(i, k).lower());
      CHECK(env_a.dist(i, k).upper() == env_b.dist(i, k).upper());
    }
}

TEST_CASE("f1/f2/f3 match their definitions") {
  const auto f1 = make_f(FVariant::F1);
  CHECK(f1.evaluate(std::vector<double>{1, 0, 0, 0, 0}) == doctest::Approx(0.25));
  const auto f3 = make_f(FVariant::F3);
  CHECK(f3.evaluate(std::vector<double>{1, 0, 0, 0, 0}) == doctest::Approx(1.0));
  const auto f2 = make_f(FVariant::F2);
  for (double v : {0.0, 0.3, 0.8})
    CHECK(f2.evaluate(std::vector<double>(5, v)) == doctest::Approx(v));
  CHECK_THROWS_AS(make_f(FVariant::F1, 4), std::invalid_argument);
}

TEST_CASE("generalized analogs reduce to f1/f2/f3 at M=5") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> y(5);
    for (auto& v : y) v = rng.uniform01();
    CHECK(chain_pairwise_max(5).evaluate(y) == doctest::Approx(make_f(FVariant::F1).evaluate(y)));
    CHECK(mixed_pairwise_max(5).evaluate(y) == doctest::Approx(make_f(FVariant::F2).evaluate(y)));
    CHECK(anchored_pairwise_max(5).evaluate(y) ==
          doctest::Approx(make_f(FVariant::F3).evaluate(y)));
  }
}

TEST_CASE("example1 environment matches its definition") {
  const auto env = make_example1_env();
  CHECK(env.num_slots == 2);
  CHECK(env.num_actions == 2);
  CHECK(env.dist(0, 1).lower() == doctest::Approx(0.4));
  CHECK(env.dist(0, 2).upper() == doctest::Approx(0.1));
  CHECK(env.dist(1, 2).lower() == doctest::Approx(0.15));

  Rng rng(1);
  for (int i = 0; i < 300; ++i) {
    // slate {a,c}: reward inside [0.4, 0.5]
    const auto ac = step(env, Slate({1, 1}), rng);
    CHECK(ac.slate_reward >= 0.4);
    CHECK(ac.slate_reward <= 0.5);
    // slate {b,d}: supports are disjoint, so the reward is always Y2(d)
    const auto bd = step(env, Slate({2, 2}), rng);
    CHECK(bd.slate_reward == bd.slot_rewards[1]);
  }
}

TEST_CASE("ssp revenue follows the reserve rule") {
  CHECK(ssp_revenue(0.5, 0.6, 0.3) == doctest::Approx(0.5));
  CHECK(ssp_revenue(0.7, 0.6, 0.3) == 0.0);
  CHECK(ssp_revenue(0.2, 0.6, 0.3) == doctest::Approx(0.3));
  CHECK_THROWS_AS(ssp_revenue(0.5, 0.3, 0.6), std::invalid_argument);
}

TEST_CASE("ssp revenue is non-decreasing in the second bid and unimodal in reserve") {
  const double x = 0.7;
  double prev = -1.0;
  for (double w = 0.0; w <= x + 1e-12; w += 0.05) {
    const double r = ssp_revenue(0.4, x, std::min(w, x));
    CHECK(r >= prev);
    prev = r;
  }
  for (double reserve = 0.0; reserve <= 1.0; reserve += 0.05) {
    const double r = ssp_revenue(reserve, x, 0.2);
    if (reserve <= x)
      CHECK(r == doctest::Approx(std::max(0.2, reserve)));
    else
      CHECK(r == 0.0);
  }
}

TEST_CASE("reserve price grid is equally spaced over [0.1, 0.8]") {
  const auto grid = ReservePriceGrid::make(15);
  CHECK(grid.price(1) == doctest::Approx(0.1));
  CHECK(grid.price(15) == doctest::Approx(0.8));
  CHECK(grid.price(9) == doctest::Approx(0.5));
  for (int a = 1; a < 15; ++a)
    CHECK(grid.price(a + 1) - grid.price(a) == doctest::Approx(0.05));
  CHECK_THROWS_AS(ReservePriceGrid::make(1), std::invalid_argument);
}

TEST_CASE("header bidding environment has K^M slates and max-of-all reward") {
  auto bids = std::make_shared<BidDistribution>(
      BidDistribution::from_lists({2.0, 3.0, 4.0}, {1.0, 2.0, 3.5}));
  std::vector<std::shared_ptr<const BidDistribution>> dists(4, bids);
  const auto env = make_header_bidding_env(dists, ReservePriceGrid::make(15));
  CHECK(env.num_slots == 4);
  CHECK(env.num_actions == 15);
  CHECK(checked_slate_count(env.num_slots, env.num_actions) == 50625);
  Rng rng(5);
  const auto outcome = step(env, Slate({1, 5, 9, 15}), rng);
  double best = 0.0;
  for (double r : outcome.slot_rewards) best = std::max(best, r);
  CHECK(outcome.slate_reward == best);
}

TEST_CASE("point-mass bids single out the matching grid reserve") {
  // X = 0.5, W = 0.2 on one SSP: revenue at reserve r is max(0.2, r) for
  // r <= 0.5 and 0 above, so the grid point 0.5 is optimal.
  const auto grid = ReservePriceGrid::make(15);
  double best_rev = -1.0;
  int best_action = 0;
  for (int a = 1; a <= 15; ++a) {
    const double rev = ssp_revenue(grid.price(a), 0.5, 0.2);
    if (rev > best_rev) {
      best_rev = rev;
      best_action = a;
    }
  }
  CHECK(grid.price(best_action) == doctest::Approx(0.5));
  CHECK(best_rev == doctest::Approx(0.5));
}

TEST_CASE("bid pairs are normalized with W <= X <= 1") {
  const auto singleton = BidDistribution::from_lists({2.0}, {4.0});
  Rng rng(8);
  auto [x, w] = sample_bid_pair(singleton, rng);
  CHECK(x == doctest::Approx(1.0));
  CHECK(w == doctest::Approx(0.5));

  const auto same = BidDistribution::from_lists({1.0}, {1.0});
  auto [x2, w2] = sample_bid_pair(same, rng);
  CHECK(x2 == doctest::Approx(1.0));
  CHECK(w2 == doctest::Approx(1.0));

  const auto mixed = BidDistribution::from_lists({0.5, 2.5, 7.0}, {1.5, 3.0, 6.0});
  for (int i = 0; i < 2000; ++i) {
    const auto [xv, wv] = sample_bid_pair(mixed, rng);
    CHECK(wv >= 0.0);
    CHECK(wv <= xv);
    CHECK(xv <= 1.0);
  }
}

TEST_CASE("synthetic bid generators respect their component definitions") {
  BidGeneratorSpec spec;
  spec.exchange1 = {{"uniform", 0.7, 30.0, 35.0, 0, 1, 1},
                    {"uniform", 0.3, 97.0, 100.0, 0, 1, 1}};
  spec.exchange2 = {{"lognormal", 1.0, 0, 1, std::log(40.0), 0.1, 60.0}};
  spec.list_size = 5000;
  Rng rng(33);
  const auto dist = realize_bid_distribution(spec, rng);
  CHECK(dist.first_list.size() == 5000);
  CHECK(dist.second_list.size() == 5000);
  CHECK(dist.max_value <= 100.0);
  CHECK(dist.max_value > 95.0);
  int low_band = 0, high_band = 0;
  for (double v : dist.first_list) {
    CHECK(v > 0.0);
    if (v <= 35.0) ++low_band;
    if (v >= 97.0) ++high_band;
  }
  CHECK(low_band + high_band == 5000);
  CHECK(std::abs(high_band / 5000.0 - 0.3) < 0.03);
  for (double v : dist.second_list) CHECK(v <= 60.0);
}

TEST_SUITE_END();
