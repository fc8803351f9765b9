#pragma once
// Ground-truth machinery: exact and Monte-Carlo expected slate rewards, the
// full mean table with best slate and minimum optimality gap, pseudo-regret
// curves, and per-period reward.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slatebandits/rng.hpp"
#include "slatebandits/slate.hpp"

namespace slatebandits {

namespace detail {

// CDF of a uniform/point/discrete slot distribution.
inline double slot_cdf(const SlotDistribution& d, double t) {
  switch (d.kind()) {
    case SlotDistribution::Kind::Uniform: {
      const double lo = d.lower(), hi = d.upper();
      if (hi == lo) return t >= lo ? 1.0 : 0.0;
      if (t <= lo) return 0.0;
      if (t >= hi) return 1.0;
      return (t - lo) / (hi - lo);
    }
    case SlotDistribution::Kind::Discrete: {
      double acc = 0.0;
      for (std::size_t i = 0; i < d.values().size(); ++i)
        if (d.values()[i] <= t) acc += d.probs()[i];
      return std::min(acc, 1.0);
    }
    case SlotDistribution::Kind::Auction:
      throw std::domain_error("exact oracle: auction distribution has no closed-form CDF");
  }
  throw std::logic_error("slot_cdf: unknown kind");
}

// 8-point Gauss-Legendre on [-1, 1]; exact for polynomials up to degree 15,
// which covers products of up to 15 piecewise-linear CDFs per interval.
inline constexpr double kGlNodes[8] = {
    -0.9602898564975362, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975362};
inline constexpr double kGlWeights[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

}  // namespace detail

// E[max_i X_i] for independent slot variables on [0, 1] with piecewise-linear
// CDFs (uniform, point mass, discrete atoms), via
//   E[max] = integral_0^1 (1 - prod_i F_i(t)) dt
// integrated exactly piecewise between CDF breakpoints.
inline double expected_max_exact(std::span<const SlotDistribution> dists) {
  if (dists.empty()) throw std::invalid_argument("expected_max_exact: empty set");
  if (dists.size() > 15)
    throw std::invalid_argument("expected_max_exact: too many variables for exact quadrature");
  std::vector<double> breaks{0.0, 1.0};
  for (const auto& d : dists) {
    switch (d.kind()) {
      case SlotDistribution::Kind::Uniform:
        breaks.push_back(d.lower());
        breaks.push_back(d.upper());
        break;
      case SlotDistribution::Kind::Discrete:
        for (double v : d.values()) breaks.push_back(v);
        break;
      case SlotDistribution::Kind::Auction:
        throw std::domain_error("exact oracle: auction slot distribution unsupported");
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  double total = 0.0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    if (b <= a) continue;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double piece = 0.0;
    for (int g = 0; g < 8; ++g) {
      const double t = mid + half * detail::kGlNodes[g];
      double prod = 1.0;
      for (const auto& d : dists) prod *= detail::slot_cdf(d, t);
      piece += detail::kGlWeights[g] * (1.0 - prod);
    }
    total += half * piece;
  }
  return total;
}

// E[max{U1, U2}] for independent uniforms U1 ~ U[l1, h1], U2 ~ U[l2, h2];
// degenerate intervals are point masses.
inline double expected_pairwise_max_uniform(double l1, double h1, double l2, double h2) {
  const SlotDistribution d[2] = {SlotDistribution::uniform(l1, h1),
                                 SlotDistribution::uniform(l2, h2)};
  return expected_max_exact(std::span<const SlotDistribution>(d, 2));
}

// Exact expected slate reward, term by term over the convex combination.
// Requires the reward function in the max-term algebra and every involved
// slot distribution uniform/point/discrete; otherwise fall back to
// mc_slate_mean.
inline double exact_slate_mean(const EnvironmentSpec& env, const Slate& slate) {
  env.check_slate(slate);
  if (!env.reward.is_algebra())
    throw std::domain_error("exact_slate_mean: opaque reward function; use the MC oracle");
  double total = 0.0;
  std::vector<SlotDistribution> chosen;
  for (const auto& term : env.reward.terms()) {
    if (term.slots.size() == 1) {
      total += term.weight * env.dist(term.slots[0], slate[term.slots[0]]).exact_mean();
      continue;
    }
    chosen.clear();
    for (int s : term.slots) chosen.push_back(env.dist(s, slate[s]));
    total += term.weight * expected_max_exact(chosen);
  }
  return total;
}

struct McEstimate {
  double mean = 0.0;
  double half_width = 0.0;  // Hoeffding, level 1 - delta
};

// Monte-Carlo expected slate reward with a Hoeffding half-width
// sqrt(ln(2/delta) / (2n)).
inline McEstimate mc_slate_mean(const EnvironmentSpec& env, const Slate& slate,
                                std::int64_t n, Rng& rng, double delta = 1e-3) {
  env.check_slate(slate);
  if (n < 1) throw std::invalid_argument("mc_slate_mean: n < 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("mc_slate_mean: delta outside (0, 1)");
  std::vector<double> rewards(static_cast<std::size_t>(env.num_slots));
  double sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    for (int s = 0; s < env.num_slots; ++s)
      rewards[static_cast<std::size_t>(s)] = env.dist(s, slate[s]).sample(rng);
    sum += env.reward.evaluate_unchecked(rewards);
  }
  const double hw = std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
  return {sum / static_cast<double>(n), hw};
}

// Expected reward of every slate plus the derived optima. Slates are indexed
// in enumeration order; ties for the best slate resolve to the
// lexicographically smallest.
struct MeanTable {
  int num_slots = 0;
  int num_actions = 0;
  std::string method;
  std::vector<double> means;  // slate-enumeration order
  double mu_star = 0.0;
  Slate best_slate;
  double delta_min = 0.0;

  double mean_of(const Slate& slate) const {
    if (slate.size() != num_slots)
      throw std::invalid_argument("MeanTable: slate length mismatch");
    for (int a : slate.actions)
      if (a < 1 || a > num_actions)
        throw std::invalid_argument("MeanTable: slate not covered by table");
    return means[SlateEnumerator::index_of(slate, num_actions)];
  }
};

namespace detail {

// Means equal within this tolerance are treated as one level when locating
// the runner-up, so floating rounding cannot fabricate a tiny gap.
inline constexpr double kGapTolerance = 1e-12;

inline void finalize_mean_table(MeanTable& table) {
  double best = -1.0;
  std::uint64_t best_idx = 0;
  for (std::uint64_t i = 0; i < table.means.size(); ++i) {
    if (table.means[i] > best) {
      best = table.means[i];
      best_idx = i;
    }
  }
  table.mu_star = best;
  table.best_slate = SlateEnumerator::slate_at(table.num_slots, table.num_actions, best_idx);
  double runner = -1.0;
  for (double m : table.means)
    if (m < table.mu_star - kGapTolerance) runner = std::max(runner, m);
  if (runner < 0.0)
    throw std::domain_error("MeanTable: all slate means equal; delta_min undefined");
  table.delta_min = table.mu_star - runner;
}

}  // namespace detail

inline MeanTable build_mean_table_exact(const EnvironmentSpec& env) {
  MeanTable table;
  table.num_slots = env.num_slots;
  table.num_actions = env.num_actions;
  table.method = "exact";
  SlateEnumerator it(env.num_slots, env.num_actions);
  table.means.reserve(it.count());

  // Precompute per-term lookups: a K-vector per identity term and a KxK
  // matrix per pairwise max; larger sets are evaluated per slate.
  if (!env.reward.is_algebra())
    throw std::domain_error("build_mean_table_exact: opaque reward function");
  const auto& terms = env.reward.terms();
  const int K = env.num_actions;
  std::vector<std::vector<double>> term_lut(terms.size());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& term = terms[k];
    if (term.slots.size() == 1) {
      term_lut[k].resize(static_cast<std::size_t>(K));
      for (int a = 1; a <= K; ++a)
        term_lut[k][static_cast<std::size_t>(a - 1)] =
            env.dist(term.slots[0], a).exact_mean();
    } else if (term.slots.size() == 2) {
      term_lut[k].resize(static_cast<std::size_t>(K) * static_cast<std::size_t>(K));
      for (int a = 1; a <= K; ++a)
        for (int b = 1; b <= K; ++b) {
          const SlotDistribution d[2] = {env.dist(term.slots[0], a),
                                         env.dist(term.slots[1], b)};
          term_lut[k][static_cast<std::size_t>(a - 1) * K + (b - 1)] =
              expected_max_exact(std::span<const SlotDistribution>(d, 2));
        }
    }
  }

  Slate slate;
  std::vector<SlotDistribution> chosen;
  while (it.next(slate)) {
    double mean = 0.0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const auto& term = terms[k];
      if (term.slots.size() == 1) {
        mean += term.weight * term_lut[k][static_cast<std::size_t>(slate[term.slots[0]] - 1)];
      } else if (term.slots.size() == 2) {
        mean += term.weight *
                term_lut[k][static_cast<std::size_t>(slate[term.slots[0]] - 1) * K +
                            (slate[term.slots[1]] - 1)];
      } else {
        chosen.clear();
        for (int s : term.slots) chosen.push_back(env.dist(s, slate[s]));
        mean += term.weight * expected_max_exact(chosen);
      }
    }
    table.means.push_back(mean);
  }
  detail::finalize_mean_table(table);
  return table;
}

inline MeanTable build_mean_table_mc(const EnvironmentSpec& env, std::int64_t n_per_slate,
                                     Rng& rng) {
  MeanTable table;
  table.num_slots = env.num_slots;
  table.num_actions = env.num_actions;
  std::ostringstream tag;
  tag << "monte-carlo(n=" << n_per_slate << ")";
  table.method = tag.str();
  SlateEnumerator it(env.num_slots, env.num_actions);
  table.means.reserve(it.count());
  Slate slate;
  while (it.next(slate))
    table.means.push_back(mc_slate_mean(env, slate, n_per_slate, rng).mean);
  detail::finalize_mean_table(table);
  return table;
}

// Cumulative pseudo-regret R_t = sum_{s<=t} (mu* - mu(i_s)).
inline std::vector<double> pseudo_regret_curve(const Trajectory& trajectory,
                                               const MeanTable& table) {
  std::vector<double> regret;
  regret.reserve(trajectory.size());
  double acc = 0.0;
  for (const auto& round : trajectory) {
    acc += table.mu_star - table.mean_of(round.slate);
    regret.push_back(acc);
  }
  return regret;
}

// PPR(t): running mean of realized slate rewards.
inline std::vector<double> per_period_reward(const Trajectory& trajectory) {
  if (trajectory.empty()) throw std::invalid_argument("per_period_reward: empty trajectory");
  std::vector<double> ppr;
  ppr.reserve(trajectory.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    acc += trajectory[t].slate_reward;
    ppr.push_back(acc / static_cast<double>(t + 1));
  }
  return ppr;
}

// The slate built by independently maximizing each slot's expected reward.
// This is what per-slot baselines converge to; with non-separable f it need
// not be the best slate.
inline Slate per_slot_greedy_slate(const EnvironmentSpec& env) {
  Slate out;
  out.actions.reserve(static_cast<std::size_t>(env.num_slots));
  for (int i = 0; i < env.num_slots; ++i) {
    int best_action = 1;
    double best_mean = env.dist(i, 1).exact_mean();
    for (int a = 2; a <= env.num_actions; ++a) {
      const double m = env.dist(i, a).exact_mean();
      if (m > best_mean) {
        best_mean = m;
        best_action = a;
      }
    }
    out.actions.push_back(best_action);
  }
  return out;
}

// Audit export: one "slate,mean" row per slate in enumeration order.
inline void write_mean_table_csv(const MeanTable& table, std::ostream& out) {
  out << "slate,mean\n";
  SlateEnumerator it(table.num_slots, table.num_actions);
  Slate slate;
  std::uint64_t idx = 0;
  char buf[64];
  while (it.next(slate)) {
    std::snprintf(buf, sizeof(buf), "%.12g", table.means[idx++]);
    out << slate.to_string() << ',' << buf << '\n';
  }
}

}  // namespace slatebandits
