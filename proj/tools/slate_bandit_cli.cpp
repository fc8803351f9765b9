// Command-line runner for slate bandit experiments.
//
// Subcommands:
//   run <config.json>    run an experiment described by a config file
//   reproduce <preset>   run a named preset (exp1, exp1-desk, example1, hb1-synth, ...)
//   oracle <config>      compute and export the slate mean table
//   ingest <csv>         build and summarize a bid distribution from a bid log
//   bound <T> <K>        print the problem-independent regret bound
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "slatebandits/harness.hpp"

namespace sb = slatebandits;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void print_results(const sb::ExperimentOutput& output) {
  for (const auto& result : output.results) {
    std::ostringstream line;
    line << to_string(result.algorithm) << ": " << to_string(result.metric) << "(T="
         << result.time_points.back() << ") = " << fmt(result.final_mean()) << "  ci95=["
         << fmt(result.final_ci_low()) << ", " << fmt(result.final_ci_high()) << "]"
         << "  replications=" << result.replications;
    if (result.misid_rate >= 0.0)
      line << "  misidentification_rate=" << fmt(result.misid_rate);
    if (result.mean_explore_rounds >= 0.0)
      line << "  mean_explore_rounds=" << fmt(result.mean_explore_rounds);
    std::cout << line.str() << "\n";
  }
}

void write_outputs(const sb::ExperimentOutput& output, const std::string& out_prefix) {
  for (const auto& result : output.results) {
    const std::string path = out_prefix + "." + to_string(result.algorithm) + ".csv";
    sb::emit_csv(result, path);
    std::cout << "wrote " << path << "\n";
  }
  const std::string meta = out_prefix + ".meta.json";
  sb::write_metadata_sidecar(output.config, meta);
  std::cout << "wrote " << meta << "\n";
}

std::vector<std::int64_t> parse_horizon_list(const std::string& csv) {
  std::vector<std::int64_t> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(std::stoll(item));
  if (out.empty()) throw std::invalid_argument("--horizon-sweep: empty list");
  return out;
}

sb::ExperimentConfig load_config_or_preset(const std::string& source) {
  if (std::filesystem::exists(source)) return sb::load_config(source);
  return sb::preset(source);
}

int run_command(sb::ExperimentConfig config, std::uint64_t seed, bool seed_set,
                std::int64_t horizon, int replications, const std::string& sweep,
                const std::string& out_prefix, int parallel) {
  if (seed_set) config.seed = seed;
  if (horizon > 0) config.horizon = horizon;
  if (replications > 0) config.replications = replications;
  if (!sweep.empty()) config.horizon_sweep = parse_horizon_list(sweep);
  const auto output = sb::run_experiment(config, parallel);
  print_results(output);
  if (!out_prefix.empty()) write_outputs(output, out_prefix);
  return 0;
}

int oracle_command(const std::string& source, std::uint64_t seed, bool seed_set,
                   std::int64_t mc_n, const std::string& out_path) {
  sb::ExperimentConfig config = load_config_or_preset(source);
  if (seed_set) config.seed = seed;
  sb::EnvironmentSpec env;
  if (const auto* u = std::get_if<sb::UniformRandomEnvConfig>(&config.environment)) {
    env = sb::detail::realize_uniform_env(*u, config.seed, 0);
  } else {
    env = *sb::detail::realize_shared_env(config).env;
  }
  sb::MeanTable table;
  if (config.exact_oracle_available()) {
    table = sb::build_mean_table_exact(env);
  } else {
    sb::Rng rng(sb::derive_seed(config.seed, 0, 99));
    table = sb::build_mean_table_mc(env, mc_n, rng);
  }
  std::cout << "method=" << table.method << " M=" << table.num_slots
            << " K=" << table.num_actions << " slates=" << table.means.size() << "\n";
  std::cout << "best_slate=" << table.best_slate.to_string() << " mu_star="
            << fmt(table.mu_star) << " delta_min=" << fmt(table.delta_min) << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open '" + out_path + "'");
    sb::write_mean_table_csv(table, out);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int ingest_command(const std::string& csv, const std::string& advertiser, int day, int hour,
                   int bootstrap_n, std::uint64_t seed, const std::string& out_path) {
  const auto parsed = sb::parse_bid_log(csv);
  std::cout << "parsed " << parsed.records.size() << " records, "
            << parsed.diagnostics.size() << " malformed line(s)\n";
  for (std::size_t i = 0; i < parsed.diagnostics.size() && i < 5; ++i)
    std::cout << "  line " << parsed.diagnostics[i].line << ": "
              << parsed.diagnostics[i].message << "\n";
  sb::Rng rng(sb::derive_seed(seed, 0, 2));
  const auto dist = sb::build_bid_distribution(parsed.records, advertiser, day, hour,
                                               bootstrap_n, rng);
  std::cout << "bootstrap lists: " << dist.first_list.size() << " + "
            << dist.second_list.size() << " values, normalizer=" << fmt(dist.max_value)
            << "\n";
  sb::Rng sample_rng(sb::derive_seed(seed, 1, 2));
  double sum_x = 0.0, sum_w = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto [x, w] = sb::sample_bid_pair(dist, sample_rng);
    sum_x += x;
    sum_w += w;
  }
  std::cout << "normalized bids: mean_top=" << fmt(sum_x / n)
            << " mean_second=" << fmt(sum_w / n) << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open '" + out_path + "'");
    out << "l1,l2\n";
    for (std::size_t i = 0; i < dist.first_list.size(); ++i)
      out << fmt(dist.first_list[i]) << ',' << fmt(dist.second_list[i]) << '\n';
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slate bandit simulation and benchmark harness"};
  app.require_subcommand(1);

  std::string config_path, preset_name, oracle_source, ingest_csv;
  std::string out_prefix, sweep, advertiser, ingest_out, oracle_out;
  std::uint64_t seed = 0;
  std::int64_t horizon = 0, bound_T = 0, mc_n = 2000;
  int replications = 0, parallel = 1, day = 0, hour = 0, bound_K = 0, bootstrap_n = 10000;

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path, "JSON experiment config")->required();

  auto* repro = app.add_subcommand("reproduce", "run a named preset");
  repro->add_option("preset", preset_name, "preset name")->required();
  repro->add_option("--horizon-sweep", sweep,
                    "comma-separated horizons; fresh runs per horizon");

  for (auto* cmd : {run, repro}) {
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--replications", replications, "replication count override");
    cmd->add_option("--horizon", horizon, "horizon override");
    cmd->add_option("--out", out_prefix, "output prefix for CSV + metadata sidecar");
    cmd->add_option("--parallel", parallel, "worker thread count");
  }

  auto* oracle = app.add_subcommand("oracle", "emit the slate mean table");
  oracle->add_option("config", oracle_source, "config file or preset name")->required();
  oracle->add_option("--seed", seed, "master seed");
  oracle->add_option("--mc-n", mc_n, "Monte-Carlo samples per slate for non-exact environments");
  oracle->add_option("--out", oracle_out, "mean table CSV path");

  auto* ingest = app.add_subcommand("ingest", "build a bid distribution from a bid log");
  ingest->add_option("csv", ingest_csv, "bid log CSV")->required();
  ingest->add_option("--advertiser", advertiser, "advertiser id filter")->required();
  ingest->add_option("--day", day, "day filter")->required();
  ingest->add_option("--hour", hour, "hour filter")->required();
  ingest->add_option("--bootstrap-n", bootstrap_n, "bootstrap sample count per exchange");
  ingest->add_option("--seed", seed, "bootstrap seed");
  ingest->add_option("--out", ingest_out, "write bootstrapped lists as CSV");

  auto* bound = app.add_subcommand("bound", "print the problem-independent regret bound");
  bound->add_option("T", bound_T, "horizon")->required();
  bound->add_option("K", bound_K, "base actions per slot")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return run_command(sb::load_config(config_path), seed, run->count("--seed") > 0,
                         horizon, replications, sweep, out_prefix, parallel);
    if (repro->parsed())
      return run_command(sb::preset(preset_name), seed, repro->count("--seed") > 0, horizon,
                         replications, sweep, out_prefix, parallel);
    if (oracle->parsed())
      return oracle_command(oracle_source, seed, oracle->count("--seed") > 0, mc_n, oracle_out);
    if (ingest->parsed())
      return ingest_command(ingest_csv, advertiser, day, hour, bootstrap_n, seed, ingest_out);
    if (bound->parsed()) {
      std::printf("%.4f\n", sb::evaluate_regret_bound(bound_T, bound_K));
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}
