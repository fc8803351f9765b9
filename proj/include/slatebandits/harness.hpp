#pragma once
// Experiment runner: named presets reproducing the simulated and
// header-bidding experiments, deterministic replication management with
// counter-derived RNG streams, aggregation with 95% confidence intervals,
// and CSV emission with a metadata sidecar that re-runs the experiment.
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "slatebandits/baselines.hpp"
#include "slatebandits/environments.hpp"
#include "slatebandits/etc_slate.hpp"
#include "slatebandits/ingestion.hpp"
#include "slatebandits/oracle.hpp"
#include "slatebandits/rng.hpp"
#include "slatebandits/slate.hpp"

namespace slatebandits {

using nlohmann::json;

enum class Algorithm { EtcSlate, Ucb1PerSlot, TsPerSlot };
enum class Metric { Regret, Ppr };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::EtcSlate: return "etc-slate";
    case Algorithm::Ucb1PerSlot: return "ucb1-per-slot";
    case Algorithm::TsPerSlot: return "ts-per-slot";
  }
  throw std::logic_error("unknown algorithm");
}

inline Algorithm algorithm_from_string(const std::string& s) {
  if (s == "etc-slate") return Algorithm::EtcSlate;
  if (s == "ucb1-per-slot") return Algorithm::Ucb1PerSlot;
  if (s == "ts-per-slot") return Algorithm::TsPerSlot;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

inline std::string to_string(Metric m) {
  return m == Metric::Regret ? "regret" : "ppr";
}

inline Metric metric_from_string(const std::string& s) {
  if (s == "regret") return Metric::Regret;
  if (s == "ppr") return Metric::Ppr;
  throw std::invalid_argument("unknown metric '" + s + "'");
}

// ---- Tuning -----------------------------------------------------------------

struct TuningConfig {
  enum class Mode { Corollary1, Corollary2, Manual };
  Mode mode = Mode::Corollary2;
  double m = 1.0;
  double delta_min = 0.0;           // corollary1
  bool delta_min_from_oracle = false;
  double kappa = 0.0;               // manual
  bool kappa_from_oracle = false;
  double gamma = 0.0;               // manual

  bool needs_oracle() const { return delta_min_from_oracle || kappa_from_oracle; }
};

inline EtcConfig resolve_etc_config(const TuningConfig& tuning, std::int64_t horizon, int K,
                                    const MeanTable* table) {
  if (tuning.needs_oracle() && table == nullptr)
    throw std::invalid_argument("tuning: oracle delta_min requested but no exact oracle available");
  EtcConfig config;
  config.horizon = horizon;
  config.m = tuning.m;
  switch (tuning.mode) {
    case TuningConfig::Mode::Corollary1: {
      const double delta = tuning.delta_min_from_oracle ? table->delta_min : tuning.delta_min;
      const auto params = tune_problem_dependent(horizon, delta, tuning.m);
      config.kappa = params.kappa;
      config.gamma = params.gamma;
      break;
    }
    case TuningConfig::Mode::Corollary2: {
      const auto params = tune_problem_independent(horizon, K, tuning.m);
      config.kappa = params.kappa;
      config.gamma = params.gamma;
      break;
    }
    case TuningConfig::Mode::Manual: {
      config.kappa = tuning.kappa_from_oracle ? table->delta_min : tuning.kappa;
      config.gamma = tuning.gamma;
      break;
    }
  }
  return config;
}

// ---- Environment configurations ---------------------------------------------

// Redrawn independently per replication.
struct UniformRandomEnvConfig {
  int M = 0;
  int K = 0;
  std::string reward_function;  // "f1"|"f2"|"f3"|"chain"|"mixed"|"star"|"max-of-all"|"average"
};

// Fixed environment, shared by all replications.
struct ExplicitEnvConfig {
  EnvironmentSpec spec;
};

// Synthetic header bidding: bid lists realized once per experiment.
struct HeaderBiddingSynthConfig {
  std::vector<BidGeneratorSpec> ssps;
  ReservePriceGrid grid;
};

// Header bidding from an ingested bid log.
struct HeaderBiddingIngestConfig {
  struct Filter {
    std::string advertiser;
    int day = 0;
    int hour = 0;
  };
  std::string csv_path;
  std::vector<Filter> ssps;
  ReservePriceGrid grid;
  int bootstrap_n = 10000;
};

using EnvConfig = std::variant<UniformRandomEnvConfig, ExplicitEnvConfig,
                               HeaderBiddingSynthConfig, HeaderBiddingIngestConfig>;

inline SlateRewardFunction resolve_reward_function(const std::string& name, int M) {
  if (name == "f1") return make_f(FVariant::F1, M);
  if (name == "f2") return make_f(FVariant::F2, M);
  if (name == "f3") return make_f(FVariant::F3, M);
  if (name == "chain") return chain_pairwise_max(M);
  if (name == "mixed") return mixed_pairwise_max(M);
  if (name == "star") return anchored_pairwise_max(M);
  if (name == "max-of-all") return SlateRewardFunction::max_of_all(M);
  if (name == "average") return SlateRewardFunction::average_of_all(M);
  throw std::invalid_argument("unknown reward function '" + name + "'");
}

// ---- Experiment configuration -----------------------------------------------

struct ExperimentConfig {
  std::string name;
  EnvConfig environment;
  std::vector<Algorithm> algorithms;
  TuningConfig tuning;
  std::int64_t horizon = 0;
  int replications = 1;
  std::uint64_t seed = 1;
  Metric metric = Metric::Regret;
  int output_points = 200;
  std::vector<std::int64_t> horizon_sweep;  // when non-empty: fresh run per horizon

  bool exact_oracle_available() const {
    if (std::holds_alternative<UniformRandomEnvConfig>(environment)) return true;
    if (const auto* e = std::get_if<ExplicitEnvConfig>(&environment)) {
      if (!e->spec.reward.is_algebra()) return false;
      for (const auto& row : e->spec.slot_dists)
        for (const auto& d : row)
          if (!d.has_exact_mean()) return false;
      return true;
    }
    return false;
  }

  void validate() const {
    if (horizon < 1) throw std::invalid_argument("config: horizon < 1");
    if (replications < 1) throw std::invalid_argument("config: replications < 1");
    if (algorithms.empty()) throw std::invalid_argument("config: no algorithms");
    if (output_points < 1) throw std::invalid_argument("config: output_points < 1");
    for (std::int64_t t : horizon_sweep)
      if (t < 1) throw std::invalid_argument("config: horizon_sweep entry < 1");
    if (const auto* e = std::get_if<UniformRandomEnvConfig>(&environment)) {
      if (e->M < 2 || e->K < 2)
        throw std::invalid_argument("config: uniform-random environment needs M >= 2, K >= 2");
      resolve_reward_function(e->reward_function, e->M);  // throws on bad name
    } else if (const auto* e2 = std::get_if<ExplicitEnvConfig>(&environment)) {
      if (!e2->spec.is_proper_problem())
        throw std::invalid_argument("config: explicit environment needs M > 1, K >= 2");
    } else if (const auto* e3 = std::get_if<HeaderBiddingSynthConfig>(&environment)) {
      if (e3->ssps.size() < 2) throw std::invalid_argument("config: need at least 2 SSPs");
    } else if (const auto* e4 = std::get_if<HeaderBiddingIngestConfig>(&environment)) {
      if (e4->ssps.size() < 2) throw std::invalid_argument("config: need at least 2 SSPs");
    }
    if (metric == Metric::Regret && !exact_oracle_available())
      throw std::invalid_argument(
          "config: regret metric requires an exact-oracle environment; use metric 'ppr'");
    if (tuning.needs_oracle() && !exact_oracle_available())
      throw std::invalid_argument("config: oracle tuning requires an exact-oracle environment");
  }
};

// ---- Aggregated output --------------------------------------------------------

struct AggregateResult {
  Algorithm algorithm = Algorithm::EtcSlate;
  Metric metric = Metric::Regret;
  int replications = 0;
  std::vector<std::int64_t> time_points;
  std::vector<double> mean, ci_low, ci_high;   // 95% CI: mean +- 1.96 sd / sqrt(R)
  std::vector<double> final_values;            // per-replication metric at the horizon
  double misid_rate = -1.0;                    // ETC with oracle only; -1 otherwise
  double mean_explore_rounds = -1.0;           // ETC only; -1 otherwise

  double final_mean() const { return mean.back(); }
  double final_ci_low() const { return ci_low.back(); }
  double final_ci_high() const { return ci_high.back(); }
};

struct ExperimentOutput {
  ExperimentConfig config;
  std::vector<AggregateResult> results;  // one per configured algorithm

  const AggregateResult& result_for(Algorithm a) const {
    for (const auto& r : results)
      if (r.algorithm == a) return r;
    throw std::invalid_argument("no result for algorithm " + to_string(a));
  }
};

// ---- JSON (config files and metadata sidecars) --------------------------------

namespace config_json {

inline json slot_to_json(const SlotDistribution& d) {
  switch (d.kind()) {
    case SlotDistribution::Kind::Uniform:
      return json{{"kind", "uniform"}, {"lo", d.lower()}, {"hi", d.upper()}};
    case SlotDistribution::Kind::Discrete:
      return json{{"kind", "discrete"}, {"values", d.values()}, {"probs", d.probs()}};
    case SlotDistribution::Kind::Auction:
      throw std::invalid_argument("config: auction slots cannot be serialized inline");
  }
  throw std::logic_error("unknown slot kind");
}

inline SlotDistribution slot_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform")
    return SlotDistribution::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
  if (kind == "discrete")
    return SlotDistribution::discrete(j.at("values").get<std::vector<double>>(),
                                      j.at("probs").get<std::vector<double>>());
  throw std::invalid_argument("config: unknown slot kind '" + kind + "'");
}

inline json reward_to_json(const SlateRewardFunction& f) {
  if (!f.is_algebra())
    throw std::invalid_argument("config: opaque reward functions cannot be serialized");
  json terms = json::array();
  for (const auto& term : f.terms()) {
    json slots = json::array();
    for (int s : term.slots) slots.push_back(s + 1);  // 1-indexed externally
    terms.push_back(json{{"weight", term.weight}, {"slots", slots}});
  }
  return json{{"terms", terms}};
}

inline SlateRewardFunction reward_from_json(const json& j, int M) {
  if (j.is_string()) return resolve_reward_function(j.get<std::string>(), M);
  std::vector<RewardTerm> terms;
  for (const auto& tj : j.at("terms")) {
    RewardTerm term;
    term.weight = tj.at("weight").get<double>();
    for (const auto& s : tj.at("slots")) term.slots.push_back(s.get<int>() - 1);
    terms.push_back(std::move(term));
  }
  return SlateRewardFunction::convex_combination(M, std::move(terms));
}

inline json component_to_json(const BidComponentSpec& c) {
  json j{{"type", c.type}, {"weight", c.weight}};
  if (c.type == "uniform") {
    j["lo"] = c.lo;
    j["hi"] = c.hi;
  } else {
    j["mu"] = c.mu;
    j["sigma"] = c.sigma;
    j["clip"] = c.clip;
  }
  return j;
}

inline BidComponentSpec component_from_json(const json& j) {
  BidComponentSpec c;
  c.type = j.at("type").get<std::string>();
  c.weight = j.value("weight", 1.0);
  if (c.type == "uniform") {
    c.lo = j.at("lo").get<double>();
    c.hi = j.at("hi").get<double>();
  } else if (c.type == "lognormal") {
    c.mu = j.at("mu").get<double>();
    c.sigma = j.at("sigma").get<double>();
    c.clip = j.at("clip").get<double>();
  } else {
    throw std::invalid_argument("config: unknown bid component '" + c.type + "'");
  }
  return c;
}

inline json grid_to_json(const ReservePriceGrid& g) {
  return json{{"K", g.num_prices}, {"low", g.low}, {"high", g.high}};
}

inline ReservePriceGrid grid_from_json(const json& j) {
  return ReservePriceGrid::make(j.at("K").get<int>(), j.value("low", 0.1), j.value("high", 0.8));
}

inline json env_to_json(const EnvConfig& env) {
  if (const auto* e = std::get_if<UniformRandomEnvConfig>(&env))
    return json{{"type", "uniform-random"},
                {"M", e->M},
                {"K", e->K},
                {"reward_function", e->reward_function}};
  if (const auto* e = std::get_if<ExplicitEnvConfig>(&env)) {
    json slots = json::array();
    for (const auto& row : e->spec.slot_dists) {
      json jrow = json::array();
      for (const auto& d : row) jrow.push_back(slot_to_json(d));
      slots.push_back(jrow);
    }
    return json{{"type", "explicit"},
                {"M", e->spec.num_slots},
                {"K", e->spec.num_actions},
                {"slots", slots},
                {"reward_function", reward_to_json(e->spec.reward)}};
  }
  if (const auto* e = std::get_if<HeaderBiddingSynthConfig>(&env)) {
    json ssps = json::array();
    for (const auto& g : e->ssps) {
      json ex1 = json::array(), ex2 = json::array();
      for (const auto& c : g.exchange1) ex1.push_back(component_to_json(c));
      for (const auto& c : g.exchange2) ex2.push_back(component_to_json(c));
      ssps.push_back(json{{"exchange1", ex1}, {"exchange2", ex2}, {"list_size", g.list_size}});
    }
    return json{{"type", "header-bidding-synthetic"},
                {"ssps", ssps},
                {"grid", grid_to_json(e->grid)}};
  }
  const auto& e = std::get<HeaderBiddingIngestConfig>(env);
  json ssps = json::array();
  for (const auto& f : e.ssps)
    ssps.push_back(json{{"advertiser", f.advertiser}, {"day", f.day}, {"hour", f.hour}});
  return json{{"type", "header-bidding-ingest"},
              {"csv", e.csv_path},
              {"ssps", ssps},
              {"grid", grid_to_json(e.grid)},
              {"bootstrap_n", e.bootstrap_n}};
}

inline EnvConfig env_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "uniform-random") {
    UniformRandomEnvConfig e;
    e.M = j.at("M").get<int>();
    e.K = j.at("K").get<int>();
    e.reward_function = j.at("reward_function").get<std::string>();
    return e;
  }
  if (type == "explicit") {
    const int M = j.at("M").get<int>();
    const int K = j.at("K").get<int>();
    std::vector<std::vector<SlotDistribution>> dists;
    for (const auto& jrow : j.at("slots")) {
      std::vector<SlotDistribution> row;
      for (const auto& jd : jrow) row.push_back(slot_from_json(jd));
      dists.push_back(std::move(row));
    }
    auto f = reward_from_json(j.at("reward_function"), M);
    return ExplicitEnvConfig{EnvironmentSpec::make(M, K, std::move(dists), std::move(f))};
  }
  if (type == "header-bidding-synthetic") {
    HeaderBiddingSynthConfig e;
    e.grid = grid_from_json(j.at("grid"));
    for (const auto& jg : j.at("ssps")) {
      BidGeneratorSpec g;
      for (const auto& jc : jg.at("exchange1")) g.exchange1.push_back(component_from_json(jc));
      for (const auto& jc : jg.at("exchange2")) g.exchange2.push_back(component_from_json(jc));
      g.list_size = jg.value("list_size", 10000);
      e.ssps.push_back(std::move(g));
    }
    return e;
  }
  if (type == "header-bidding-ingest") {
    HeaderBiddingIngestConfig e;
    e.csv_path = j.at("csv").get<std::string>();
    e.grid = grid_from_json(j.at("grid"));
    e.bootstrap_n = j.value("bootstrap_n", 10000);
    for (const auto& jf : j.at("ssps"))
      e.ssps.push_back({jf.at("advertiser").get<std::string>(), jf.at("day").get<int>(),
                        jf.at("hour").get<int>()});
    return e;
  }
  throw std::invalid_argument("config: unknown environment type '" + type + "'");
}

inline json tuning_to_json(const TuningConfig& t) {
  switch (t.mode) {
    case TuningConfig::Mode::Corollary1: {
      json j{{"mode", "corollary1"}, {"m", t.m}};
      if (t.delta_min_from_oracle)
        j["delta_min"] = "oracle";
      else
        j["delta_min"] = t.delta_min;
      return j;
    }
    case TuningConfig::Mode::Corollary2:
      return json{{"mode", "corollary2"}, {"m", t.m}};
    case TuningConfig::Mode::Manual: {
      json j{{"mode", "manual"}, {"gamma", t.gamma}};
      if (t.kappa_from_oracle)
        j["kappa"] = "oracle";
      else
        j["kappa"] = t.kappa;
      return j;
    }
  }
  throw std::logic_error("unknown tuning mode");
}

inline TuningConfig tuning_from_json(const json& j) {
  TuningConfig t;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "corollary1") {
    t.mode = TuningConfig::Mode::Corollary1;
    t.m = j.value("m", 1.0);
    if (j.at("delta_min").is_string()) {
      if (j.at("delta_min").get<std::string>() != "oracle")
        throw std::invalid_argument("config: delta_min must be a number or 'oracle'");
      t.delta_min_from_oracle = true;
    } else {
      t.delta_min = j.at("delta_min").get<double>();
    }
  } else if (mode == "corollary2") {
    t.mode = TuningConfig::Mode::Corollary2;
    t.m = j.value("m", 1.0);
  } else if (mode == "manual") {
    t.mode = TuningConfig::Mode::Manual;
    t.gamma = j.at("gamma").get<double>();
    if (j.at("kappa").is_string()) {
      if (j.at("kappa").get<std::string>() != "oracle")
        throw std::invalid_argument("config: kappa must be a number or 'oracle'");
      t.kappa_from_oracle = true;
    } else {
      t.kappa = j.at("kappa").get<double>();
    }
  } else {
    throw std::invalid_argument("config: unknown tuning mode '" + mode + "'");
  }
  return t;
}

}  // namespace config_json

inline json to_json(const ExperimentConfig& c) {
  json algos = json::array();
  for (Algorithm a : c.algorithms) algos.push_back(to_string(a));
  json j{{"name", c.name},
         {"environment", config_json::env_to_json(c.environment)},
         {"algorithms", algos},
         {"tuning", config_json::tuning_to_json(c.tuning)},
         {"horizon", c.horizon},
         {"replications", c.replications},
         {"seed", c.seed},
         {"metric", to_string(c.metric)},
         {"output_points", c.output_points}};
  if (!c.horizon_sweep.empty()) j["horizon_sweep"] = c.horizon_sweep;
  return j;
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.name = j.value("name", std::string{});
  c.environment = config_json::env_from_json(j.at("environment"));
  for (const auto& ja : j.at("algorithms"))
    c.algorithms.push_back(algorithm_from_string(ja.get<std::string>()));
  c.tuning = config_json::tuning_from_json(j.at("tuning"));
  c.horizon = j.at("horizon").get<std::int64_t>();
  c.replications = j.at("replications").get<int>();
  c.seed = j.value("seed", std::uint64_t{1});
  c.metric = metric_from_string(j.value("metric", std::string{"regret"}));
  c.output_points = j.value("output_points", 200);
  if (j.contains("horizon_sweep"))
    c.horizon_sweep = j.at("horizon_sweep").get<std::vector<std::int64_t>>();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  json j;
  in >> j;
  return config_from_json(j);
}

// ---- Runner -------------------------------------------------------------------

namespace detail {

// Stream tags for counter-based seed derivation.
inline constexpr std::uint64_t kStreamEnv = 1;
inline constexpr std::uint64_t kStreamBids = 2;
inline constexpr std::uint64_t kStreamSweep = 3;
inline constexpr std::uint64_t kStreamAlgoBase = 16;

inline std::vector<std::int64_t> make_checkpoints(std::int64_t horizon, int points) {
  std::vector<std::int64_t> out;
  const auto p = static_cast<std::int64_t>(points);
  for (std::int64_t j = 1; j <= p; ++j) {
    const std::int64_t t = std::max<std::int64_t>(1, (horizon * j) / p);
    if (out.empty() || out.back() != t) out.push_back(t);
  }
  if (out.back() != horizon) out.push_back(horizon);
  return out;
}

struct RepOutcome {
  std::vector<double> curve;  // metric at each checkpoint
  bool etc_misidentified = false;
  std::int64_t etc_explore_rounds = -1;
  bool ok = false;
  std::string error;
};

struct SharedEnv {
  // Set when the environment is fixed across replications.
  std::optional<EnvironmentSpec> env;
  std::optional<MeanTable> table;
};

inline EnvironmentSpec realize_uniform_env(const UniformRandomEnvConfig& cfg,
                                           std::uint64_t seed, int rep) {
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep), kStreamEnv));
  return make_uniform_env(cfg.M, cfg.K, resolve_reward_function(cfg.reward_function, cfg.M),
                          rng);
}

inline SharedEnv realize_shared_env(const ExperimentConfig& config) {
  SharedEnv shared;
  if (const auto* e = std::get_if<ExplicitEnvConfig>(&config.environment)) {
    shared.env = e->spec;
  } else if (const auto* e = std::get_if<HeaderBiddingSynthConfig>(&config.environment)) {
    std::vector<std::shared_ptr<const BidDistribution>> dists;
    for (std::size_t i = 0; i < e->ssps.size(); ++i) {
      Rng rng(derive_seed(config.seed, i, kStreamBids));
      dists.push_back(std::make_shared<BidDistribution>(
          realize_bid_distribution(e->ssps[i], rng)));
    }
    shared.env = make_header_bidding_env(std::move(dists), e->grid);
  } else if (const auto* e = std::get_if<HeaderBiddingIngestConfig>(&config.environment)) {
    const auto parsed = parse_bid_log(e->csv_path);
    std::vector<std::shared_ptr<const BidDistribution>> dists;
    for (std::size_t i = 0; i < e->ssps.size(); ++i) {
      Rng rng(derive_seed(config.seed, i, kStreamBids));
      dists.push_back(std::make_shared<BidDistribution>(
          build_bid_distribution(parsed.records, e->ssps[i].advertiser, e->ssps[i].day,
                                 e->ssps[i].hour, e->bootstrap_n, rng)));
    }
    shared.env = make_header_bidding_env(std::move(dists), e->grid);
  }
  if (shared.env && config.exact_oracle_available() &&
      (config.metric == Metric::Regret || config.tuning.needs_oracle()))
    shared.table = build_mean_table_exact(*shared.env);
  return shared;
}

inline std::vector<double> sample_curve(const std::vector<double>& full,
                                        const std::vector<std::int64_t>& checkpoints) {
  std::vector<double> out;
  out.reserve(checkpoints.size());
  for (std::int64_t t : checkpoints) out.push_back(full[static_cast<std::size_t>(t - 1)]);
  return out;
}

}  // namespace detail

inline ExperimentOutput run_experiment(const ExperimentConfig& config, int num_workers = 1);

namespace detail {

inline ExperimentOutput run_horizon_sweep(const ExperimentConfig& config, int num_workers) {
  ExperimentOutput out;
  out.config = config;
  std::vector<std::vector<AggregateResult>> per_horizon;
  for (std::size_t h = 0; h < config.horizon_sweep.size(); ++h) {
    ExperimentConfig sub = config;
    sub.horizon_sweep.clear();
    sub.horizon = config.horizon_sweep[h];
    sub.seed = derive_seed(config.seed, h, kStreamSweep);
    per_horizon.push_back(run_experiment(sub, num_workers).results);
  }
  for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
    AggregateResult agg;
    agg.algorithm = config.algorithms[a];
    agg.metric = config.metric;
    agg.replications = config.replications;
    for (std::size_t h = 0; h < config.horizon_sweep.size(); ++h) {
      const auto& r = per_horizon[h][a];
      agg.time_points.push_back(config.horizon_sweep[h]);
      agg.mean.push_back(r.final_mean());
      agg.ci_low.push_back(r.final_ci_low());
      agg.ci_high.push_back(r.final_ci_high());
      agg.final_values.push_back(r.final_mean());
    }
    out.results.push_back(std::move(agg));
  }
  return out;
}

}  // namespace detail

// Runs R independent replications per configured algorithm. Every stochastic
// input derives deterministically from (seed, replication index, purpose), so
// the output is a pure function of the config and is identical for any
// worker count.
inline ExperimentOutput run_experiment(const ExperimentConfig& config, int num_workers) {
  config.validate();
  if (!config.horizon_sweep.empty()) return detail::run_horizon_sweep(config, num_workers);

  const auto checkpoints = detail::make_checkpoints(config.horizon, config.output_points);
  const detail::SharedEnv shared = detail::realize_shared_env(config);
  const auto* uniform_cfg = std::get_if<UniformRandomEnvConfig>(&config.environment);
  const int R = config.replications;
  const auto num_algos = config.algorithms.size();

  std::vector<std::vector<detail::RepOutcome>> outcomes(num_algos);
  for (auto& v : outcomes) v.resize(static_cast<std::size_t>(R));

  auto run_rep = [&](int rep) {
    EnvironmentSpec local_env;
    const EnvironmentSpec* env = nullptr;
    std::optional<MeanTable> local_table;
    const MeanTable* table = nullptr;
    try {
      if (shared.env) {
        env = &*shared.env;
        if (shared.table) table = &*shared.table;
      } else {
        local_env = detail::realize_uniform_env(*uniform_cfg, config.seed, rep);
        env = &local_env;
        if (config.metric == Metric::Regret || config.tuning.needs_oracle()) {
          local_table = build_mean_table_exact(local_env);
          table = &*local_table;
        }
      }
    } catch (const std::exception& ex) {
      for (std::size_t a = 0; a < num_algos; ++a) {
        outcomes[a][static_cast<std::size_t>(rep)].ok = false;
        outcomes[a][static_cast<std::size_t>(rep)].error = ex.what();
      }
      return;
    }
    for (std::size_t a = 0; a < num_algos; ++a) {
      auto& slot = outcomes[a][static_cast<std::size_t>(rep)];
      try {
        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(rep),
                            detail::kStreamAlgoBase + a));
        Trajectory trajectory;
        if (config.algorithms[a] == Algorithm::EtcSlate) {
          const EtcConfig etc =
              resolve_etc_config(config.tuning, config.horizon, env->num_actions, table);
          EtcResult result = run_etc_slate(*env, etc, rng);
          slot.etc_explore_rounds = result.explore_rounds;
          if (table) slot.etc_misidentified = !(result.chosen_slate == table->best_slate);
          trajectory = std::move(result.trajectory);
        } else {
          const SlotAlgo algo = config.algorithms[a] == Algorithm::Ucb1PerSlot
                                    ? SlotAlgo::Ucb1
                                    : SlotAlgo::ThompsonSampling;
          trajectory = run_per_slot_baseline(*env, algo, config.horizon, rng);
        }
        const std::vector<double> full = config.metric == Metric::Regret
                                             ? pseudo_regret_curve(trajectory, *table)
                                             : per_period_reward(trajectory);
        slot.curve = detail::sample_curve(full, checkpoints);
        slot.ok = true;
      } catch (const std::exception& ex) {
        slot.ok = false;
        slot.error = ex.what();
      }
    }
  };

  const int workers = std::max(1, num_workers);
  if (workers == 1 || R == 1) {
    for (int rep = 0; rep < R; ++rep) run_rep(rep);
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int rep = next.fetch_add(1);
        if (rep >= R) return;
        run_rep(rep);
      }
    };
    std::vector<std::thread> pool;
    const int n = std::min(workers, R);
    pool.reserve(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Replication failures are collected per run and reported together.
  std::string errors;
  int error_count = 0;
  for (std::size_t a = 0; a < num_algos; ++a)
    for (int rep = 0; rep < R; ++rep) {
      const auto& slot = outcomes[a][static_cast<std::size_t>(rep)];
      if (!slot.ok) {
        ++error_count;
        if (error_count <= 5)
          errors += "\n  " + to_string(config.algorithms[a]) + " rep " +
                    std::to_string(rep) + ": " + slot.error;
      }
    }
  if (error_count > 0)
    throw std::runtime_error("run_experiment: " + std::to_string(error_count) +
                             " replication(s) failed:" + errors);

  ExperimentOutput out;
  out.config = config;
  for (std::size_t a = 0; a < num_algos; ++a) {
    AggregateResult agg;
    agg.algorithm = config.algorithms[a];
    agg.metric = config.metric;
    agg.replications = R;
    agg.time_points = checkpoints;
    const auto points = checkpoints.size();
    agg.mean.resize(points);
    agg.ci_low.resize(points);
    agg.ci_high.resize(points);
    for (std::size_t p = 0; p < points; ++p) {
      double sum = 0.0;
      for (int rep = 0; rep < R; ++rep)
        sum += outcomes[a][static_cast<std::size_t>(rep)].curve[p];
      const double mean = sum / R;
      double half_width = 0.0;
      if (R > 1) {
        double sq = 0.0;
        for (int rep = 0; rep < R; ++rep) {
          const double d = outcomes[a][static_cast<std::size_t>(rep)].curve[p] - mean;
          sq += d * d;
        }
        const double sd = std::sqrt(sq / (R - 1));
        half_width = 1.96 * sd / std::sqrt(static_cast<double>(R));
      }
      agg.mean[p] = mean;
      agg.ci_low[p] = mean - half_width;
      agg.ci_high[p] = mean + half_width;
    }
    for (int rep = 0; rep < R; ++rep)
      agg.final_values.push_back(outcomes[a][static_cast<std::size_t>(rep)].curve.back());
    if (config.algorithms[a] == Algorithm::EtcSlate) {
      double explore_sum = 0.0;
      int misid = 0;
      for (int rep = 0; rep < R; ++rep) {
        const auto& slot = outcomes[a][static_cast<std::size_t>(rep)];
        explore_sum += static_cast<double>(slot.etc_explore_rounds);
        misid += slot.etc_misidentified ? 1 : 0;
      }
      agg.mean_explore_rounds = explore_sum / R;
      const bool oracle_known = config.exact_oracle_available() &&
                                (config.metric == Metric::Regret || config.tuning.needs_oracle());
      if (oracle_known) agg.misid_rate = static_cast<double>(misid) / R;
    }
    out.results.push_back(std::move(agg));
  }
  return out;
}

// ---- CSV emission ---------------------------------------------------------------

inline void emit_csv(const AggregateResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "'");
  out << "t,metric_mean,metric_ci_low,metric_ci_high\n";
  char buf[160];
  for (std::size_t p = 0; p < result.time_points.size(); ++p) {
    std::snprintf(buf, sizeof(buf), "%lld,%.12g,%.12g,%.12g",
                  static_cast<long long>(result.time_points[p]), result.mean[p],
                  result.ci_low[p], result.ci_high[p]);
    out << buf << '\n';
  }
}

// The sidecar records the full resolved config (including the seed); feeding
// it back through `run` reproduces the experiment byte for byte.
inline void write_metadata_sidecar(const ExperimentConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_metadata_sidecar: cannot open '" + path + "'");
  out << to_json(config).dump(2) << '\n';
}

// ---- Presets ---------------------------------------------------------------------

namespace detail {

inline BidGeneratorSpec jackpot_ssp(double low_lo, double low_hi, double jackpot_weight,
                                    double second_lo, double second_hi) {
  BidGeneratorSpec g;
  g.exchange1 = {{"uniform", 1.0 - jackpot_weight, low_lo, low_hi, 0, 1, 1},
                 {"uniform", jackpot_weight, 97.0, 100.0, 0, 1, 1}};
  g.exchange2 = {{"uniform", 1.0, second_lo, second_hi, 0, 1, 1}};
  return g;
}

inline BidGeneratorSpec background_ssp(double lo1, double hi1, double lo2, double hi2,
                                       double tail_weight) {
  BidGeneratorSpec g;
  g.exchange1 = {{"uniform", 1.0 - tail_weight, lo1, hi1, 0, 1, 1},
                 {"uniform", tail_weight, 90.0, 100.0, 0, 1, 1}};
  g.exchange2 = {{"uniform", 1.0 - tail_weight, lo2, hi2, 0, 1, 1},
                 {"uniform", tail_weight, 85.0, 95.0, 0, 1, 1}};
  return g;
}

// Lognormal-bodied background with the same high-bid tail bands as the
// uniform backgrounds; the clip stays below the tail so the tail sets the
// normalizer.
inline BidGeneratorSpec lognormal_background_ssp(double mu, double sigma, double clip,
                                                 double second_lo, double second_hi,
                                                 double tail_weight) {
  BidGeneratorSpec g;
  g.exchange1 = {{"lognormal", 1.0 - tail_weight, 0, 1, mu, sigma, clip},
                 {"uniform", tail_weight, 90.0, 100.0, 0, 1, 1}};
  g.exchange2 = {{"uniform", 1.0 - tail_weight, second_lo, second_hi, 0, 1, 1},
                 {"uniform", tail_weight, 85.0, 95.0, 0, 1, 1}};
  return g;
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
  return {"exp1",     "exp2",     "exp3",     "exp1-desk", "exp2-desk",
          "exp3-desk", "example1", "hb1-synth", "hb2-synth", "hb3-synth"};
}

inline ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.tuning.mode = TuningConfig::Mode::Corollary2;
  c.tuning.m = 1.0;
  c.seed = 1;

  const auto simulated = [&](int M, int K, const std::string& f, std::int64_t T, int R) {
    c.environment = UniformRandomEnvConfig{M, K, f};
    c.algorithms = {Algorithm::EtcSlate, Algorithm::Ucb1PerSlot, Algorithm::TsPerSlot};
    c.horizon = T;
    c.replications = R;
    c.metric = Metric::Regret;
  };

  if (name == "exp1") {
    simulated(5, 10, "f1", 100000, 200);
  } else if (name == "exp2") {
    simulated(5, 10, "f2", 100000, 200);
  } else if (name == "exp3") {
    simulated(5, 10, "f3", 100000, 200);
  } else if (name == "exp1-desk") {
    simulated(3, 5, "chain", 20000, 50);
  } else if (name == "exp2-desk") {
    simulated(3, 5, "mixed", 20000, 50);
  } else if (name == "exp3-desk") {
    simulated(3, 5, "star", 20000, 50);
  } else if (name == "example1") {
    c.environment = ExplicitEnvConfig{make_example1_env()};
    c.algorithms = {Algorithm::EtcSlate};
    c.tuning.mode = TuningConfig::Mode::Manual;
    c.tuning.kappa_from_oracle = true;  // kappa = oracle delta_min
    c.tuning.gamma = 0.05;
    c.horizon = 20000;
    c.replications = 500;
    c.metric = Metric::Regret;
  } else if (name == "hb1-synth" || name == "hb2-synth" || name == "hb3-synth") {
    HeaderBiddingSynthConfig env;
    env.grid = ReservePriceGrid::make(15, 0.1, 0.8);
    if (name == "hb1-synth") {
      env.ssps = {detail::jackpot_ssp(31, 35, 0.18, 26, 30),
                  detail::background_ssp(40, 50, 38, 48, 0.10),
                  detail::lognormal_background_ssp(std::log(45.0), 0.10, 60.0, 40, 48, 0.10),
                  detail::background_ssp(38, 50, 36, 46, 0.12)};
    } else if (name == "hb2-synth") {
      env.ssps = {detail::jackpot_ssp(33, 37, 0.16, 28, 32),
                  detail::background_ssp(42, 52, 40, 50, 0.08),
                  detail::background_ssp(39, 49, 37, 47, 0.11),
                  detail::lognormal_background_ssp(std::log(42.0), 0.12, 58.0, 38, 46, 0.10)};
    } else {
      env.ssps = {detail::jackpot_ssp(27, 31, 0.20, 22, 26),
                  detail::background_ssp(44, 54, 42, 52, 0.09),
                  detail::background_ssp(41, 51, 39, 49, 0.10),
                  detail::background_ssp(37, 49, 35, 45, 0.13)};
    }
    c.environment = std::move(env);
    c.algorithms = {Algorithm::EtcSlate, Algorithm::Ucb1PerSlot, Algorithm::TsPerSlot};
    c.horizon = 50000;
    c.replications = 50;
    c.metric = Metric::Ppr;
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return c;
}

}  // namespace slatebandits
