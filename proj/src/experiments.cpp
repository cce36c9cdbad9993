#include "qsg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <tuple>

#include <CLI11.hpp>

#include "qsg/csv.hpp"
#include "qsg/estimators.hpp"
#include "qsg/manifest.hpp"
#include "qsg/parallel.hpp"
#include "qsg/stats.hpp"
#include "qsg/theory.hpp"

namespace qsg {

namespace {

ChannelSpec channel_from(const KeyValueConfig& kv) {
  const std::string kind = kv.require_string("channel");
  ChannelSpec spec;
  if (kind == "soft") {
    spec = ChannelSpec::soft();
  } else if (kind == "hard") {
    spec = ChannelSpec::hard();
  } else if (kind == "topm") {
    spec = ChannelSpec::top_m(static_cast<int>(kv.require_int("m")));
  } else {
    throw ConfigError(kv.source() + ": field 'channel' must be one of soft|hard|topm, got '" +
                      kind + "'");
  }
  if (kv.has("temperature")) spec.temperature = kv.require_double("temperature");
  if (kv.has("bias_h")) spec.bias_h = kv.require_double("bias_h");
  return spec;
}

InitSpec init_from(const KeyValueConfig& kv, int population, int label_count) {
  const std::string kind = kv.get_string("init", "symmetric");
  if (kind == "symmetric") return InitSpec::symmetric();
  if (kind == "dirichlet") return InitSpec::dirichlet(kv.require_double("dirichlet_concentration"));
  if (kind == "explicit") {
    const std::vector<double> flat = kv.require_list("explicit_states");
    if (static_cast<long>(flat.size()) != static_cast<long>(population) * label_count)
      throw ConfigError(kv.source() + ": field 'explicit_states' must hold N*K = " +
                        std::to_string(population * label_count) + " values, got " +
                        std::to_string(flat.size()));
    std::vector<SimplexVector> states;
    states.reserve(static_cast<std::size_t>(population));
    for (int i = 0; i < population; ++i) {
      std::vector<double> w(flat.begin() + static_cast<long>(i) * label_count,
                            flat.begin() + static_cast<long>(i + 1) * label_count);
      states.emplace_back(std::move(w));
    }
    return InitSpec::explicit_states(std::move(states));
  }
  throw ConfigError(kv.source() +
                    ": field 'init' must be one of symmetric|dirichlet|explicit, got '" + kind +
                    "'");
}

StopRule stop_from(const KeyValueConfig& kv) {
  const std::string kind = kv.get_string("stop", "none");
  if (kind == "none") return StopRule::none();
  if (kind == "threshold") return StopRule::threshold(kv.get_double("u_star", 0.9));
  if (kind == "absorption") return StopRule::absorption();
  throw ConfigError(kv.source() +
                    ": field 'stop' must be one of none|threshold|absorption, got '" + kind +
                    "'");
}

struct LoadedConfig {
  KeyValueConfig kv;
  SimConfig sim;
  long trials = 1;
  std::map<std::string, std::string> echo;
};

LoadedConfig load_config(const CliOptions& options) {
  LoadedConfig loaded{KeyValueConfig::parse_file(options.config_path), {}, 1, {}};
  loaded.sim = sim_config_from(loaded.kv);
  loaded.trials = loaded.kv.get_int("trials", 1);
  if (options.seed_override) loaded.sim.seed = *options.seed_override;
  if (options.trials_override) loaded.trials = *options.trials_override;
  if (loaded.trials < 1)
    throw ConfigError(loaded.kv.source() + ": field 'trials' must be >= 1");
  loaded.echo = loaded.kv.raw();
  loaded.echo["seed"] = std::to_string(loaded.sim.seed);
  loaded.echo["trials"] = std::to_string(loaded.trials);
  return loaded;
}

RunManifest start_manifest(const std::string& command, const LoadedConfig& loaded,
                           const CliOptions& options) {
  RunManifest manifest;
  manifest.command = command;
  manifest.config_echo = loaded.echo;
  manifest.master_seed = loaded.sim.seed;
  manifest.trials = loaded.trials;
  manifest.workers = resolve_workers(options.workers);
  manifest.started_utc = utc_timestamp();
  return manifest;
}

// Mean-field overlay value for a probe row; the Soft limit is the flat
// symmetric-start curve.
double theory_meanfield(const SimConfig& config, long step) {
  const auto m = effective_bandwidth(config.channel);
  if (!m) return 1.0 / config.label_count;
  return meanfield_u(static_cast<double>(step), config.population, config.label_count, *m,
                     config.adaptation_rate);
}

double theory_drift(const SimConfig& config, double u, double v) {
  const auto m = effective_bandwidth(config.channel);
  if (!m) return soft_u_drift(v, config.population, config.adaptation_rate);
  return total_u_drift(u, v, config.population, config.label_count, *m,
                       config.adaptation_rate)
      .total;
}

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

SimConfig sim_config_from(const KeyValueConfig& kv) {
  const long schema = kv.require_int("schema_version");
  if (schema != 1)
    throw ConfigError(kv.source() + ": unsupported schema_version " + std::to_string(schema));
  SimConfig config;
  config.population = static_cast<int>(kv.require_int("N"));
  config.label_count = static_cast<int>(kv.require_int("K"));
  config.adaptation_rate = kv.require_double("alpha");
  config.channel = channel_from(kv);
  config.horizon = kv.require_int("horizon");
  config.probe_every = kv.get_int("probe_every", 1);
  config.stop = stop_from(kv);
  config.seed = static_cast<std::uint64_t>(kv.require_int("seed"));
  config.init = init_from(kv, config.population, config.label_count);
  try {
    config.validate();
  } catch (const std::exception& e) {
    throw ConfigError(kv.source() + ": " + e.what());
  }
  return config;
}

int cmd_run(const CliOptions& options) {
  return guarded([&] {
    const LoadedConfig loaded = load_config(options);
    std::filesystem::create_directories(options.out_dir);
    RunManifest manifest = start_manifest("run", loaded, options);

    const Trajectory traj = run(loaded.sim, 0);
    CsvWriter writer(options.out_dir / "trajectory.csv",
                     trajectory_columns(loaded.sim.label_count));
    write_trajectory_csv(writer, traj);
    writer.close();

    manifest.finished_utc = utc_timestamp();
    manifest.add_output(options.out_dir / "trajectory.csv");
    manifest.write(options.out_dir / "run.manifest.json");
  });
}

int cmd_sweep(const CliOptions& options) {
  return guarded([&] {
    const LoadedConfig loaded = load_config(options);
    const std::string axis = loaded.kv.require_string("axis");
    std::vector<double> values = loaded.kv.require_list("values");
    if (values.empty())
      throw ConfigError(loaded.kv.source() + ": field 'values' must not be empty");
    std::sort(values.begin(), values.end());

    auto apply_axis = [&](double value) {
      SimConfig config = loaded.sim;
      if (axis == "N") {
        config.population = static_cast<int>(std::llround(value));
      } else if (axis == "m") {
        config.channel.kind = ChannelKind::kTopM;
        config.channel.bandwidth = static_cast<int>(std::llround(value));
      } else if (axis == "T") {
        config.channel.temperature = value;
      } else if (axis == "h") {
        config.channel.bias_h = value;
      } else if (axis == "alpha") {
        config.adaptation_rate = value;
      } else {
        throw ConfigError(loaded.kv.source() +
                          ": field 'axis' must be one of N|m|T|h|alpha, got '" + axis + "'");
      }
      try {
        config.validate();
      } catch (const std::exception& e) {
        throw ConfigError(loaded.kv.source() + ": axis value " + csv_number(value) + ": " +
                          e.what());
      }
      return config;
    };

    std::filesystem::create_directories(options.out_dir);
    RunManifest manifest = start_manifest("sweep", loaded, options);

    std::vector<std::string> columns = {"axis", "value",  "trial", "step",
                                        "U",    "V",      "q",     "S",
                                        "H",    "M",      "p_max", "theory_meanfield_U",
                                        "theory_drift"};
    CsvWriter writer(options.out_dir / "sweep.csv", columns);
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
      const SimConfig config = apply_axis(values[vi]);
      const EnsembleResult ensemble =
          run_ensemble(config, loaded.trials, options.workers, true,
                       static_cast<std::uint64_t>(vi) << 32);
      for (long trial = 0; trial < loaded.trials; ++trial) {
        const Trajectory& traj = ensemble.trajectories[static_cast<std::size_t>(trial)];
        for (const auto& probe : traj.probes) {
          const ObservableRecord& r = probe.record;
          writer.row(std::vector<std::string>{
              axis, csv_number(values[vi]), csv_number(trial), csv_number(probe.step),
              csv_number(r.polarization), csv_number(r.disagreement),
              csv_number(r.self_overlap), csv_number(r.coordination), csv_number(r.entropy),
              csv_number(r.magnetization), csv_number(r.p_max),
              csv_number(theory_meanfield(config, probe.step)),
              csv_number(theory_drift(config, r.polarization, r.disagreement))});
        }
      }
    }
    writer.close();

    manifest.finished_utc = utc_timestamp();
    manifest.add_output(options.out_dir / "sweep.csv");
    manifest.write(options.out_dir / "sweep.manifest.json");
  });
}

int cmd_drift_check(const CliOptions& options) {
  return guarded([&] {
    const LoadedConfig loaded = load_config(options);
    if (!loaded.sim.channel.is_quantized())
      throw ConfigError(loaded.kv.source() +
                        ": drift-check needs a quantized channel (hard or topm)");
    const int m = *effective_bandwidth(loaded.sim.channel);
    const long count = loaded.kv.get_int("snapshot_count", 30);
    if (count < 1)
      throw ConfigError(loaded.kv.source() + ": field 'snapshot_count' must be >= 1");
    const double t_char = m * static_cast<double>(loaded.sim.population) *
                          loaded.sim.population /
                          (loaded.sim.adaptation_rate * loaded.sim.adaptation_rate);
    const long max_step = loaded.kv.get_int("snapshot_horizon",
                                            static_cast<long>(std::llround(t_char)));
    const long samples = loaded.kv.get_int("drift_samples", 200000);
    if (samples < 1)
      throw ConfigError(loaded.kv.source() + ": field 'drift_samples' must be >= 1");

    std::filesystem::create_directories(options.out_dir);
    RunManifest manifest = start_manifest("drift-check", loaded, options);

    // Snapshot times are log-spaced over [N, max_step], one independent run
    // per snapshot so late snapshots are not correlated with early ones.
    // Numerically absorbed states are skipped; the identity is 0 = 0 there.
    const double max_overlap = loaded.kv.get_double("snapshot_max_overlap", 0.999);
    const double t_min = loaded.sim.population;
    const double t_max = std::max<double>(t_min + 1, static_cast<double>(max_step));
    std::vector<std::string> columns = {"snapshot", "step",      "m",
                                        "q",        "U",         "V",
                                        "measured", "std_error", "predicted",
                                        "pull",     "n"};
    CsvWriter writer(options.out_dir / "drift_check.csv", columns);
    CsvWriter estimates(options.out_dir / "estimates.csv", estimate_columns());
    const std::string config_hash = config_digest(loaded.echo);
    for (long j = 0; j < count; ++j) {
      const double frac = count == 1 ? 0.0 : static_cast<double>(j) / (count - 1);
      const long t = static_cast<long>(
          std::llround(std::exp(std::log(t_min) + frac * (std::log(t_max) - std::log(t_min)))));
      const PopulationState snapshot =
          drift_snapshot(loaded.sim, t, max_overlap, static_cast<std::uint64_t>(j));
      RandomSource rng = RandomSource(loaded.sim.seed).split(0xd51f7 + j);
      const ExcessDriftResult result = excess_drift(
          snapshot, loaded.sim.channel, loaded.sim.adaptation_rate, samples, rng,
          options.workers);
      const double diff = result.measured.value - result.predicted;
      const double pull = result.measured.std_error > 0.0
                              ? diff / result.measured.std_error
                              : (diff == 0.0 ? 0.0
                                             : std::numeric_limits<double>::infinity());
      writer.row(std::vector<std::string>{
          csv_number(j), csv_number(t), csv_number(static_cast<long>(m)),
          csv_number(self_overlap(snapshot)), csv_number(polarization(snapshot)),
          csv_number(disagreement(snapshot)), csv_number(result.measured.value),
          csv_number(result.measured.std_error), csv_number(result.predicted),
          csv_number(pull), csv_number(result.measured.n)});
      estimates.row(estimate_row("excess_drift_snapshot_" + std::to_string(j),
                                 result.measured.value, result.measured.std_error,
                                 result.measured.n, config_hash));
    }
    writer.close();
    estimates.close();

    manifest.finished_utc = utc_timestamp();
    manifest.add_output(options.out_dir / "drift_check.csv");
    manifest.add_output(options.out_dir / "estimates.csv");
    manifest.write(options.out_dir / "drift_check.manifest.json");
  });
}

int cmd_fixation(const CliOptions& options) {
  return guarded([&] {
    const LoadedConfig loaded = load_config(options);
    if (loaded.sim.label_count != 2)
      throw ConfigError(loaded.kv.source() + ": fixation grids require K = 2");
    if (!loaded.sim.channel.is_quantized())
      throw ConfigError(loaded.kv.source() +
                        ": fixation needs a quantized channel (hard or topm)");
    const std::vector<double> n_values = loaded.kv.require_list("N_values");
    const std::vector<double> h_values = loaded.kv.require_list("h_values");
    if (n_values.empty() || h_values.empty())
      throw ConfigError(loaded.kv.source() + ": 'N_values' and 'h_values' must not be empty");
    const double u_star = loaded.kv.get_double("u_star", 0.9);
    const double horizon_multiplier = loaded.kv.get_double("horizon_multiplier", 12.0);
    const int m = *effective_bandwidth(loaded.sim.channel);

    std::vector<double> ns = n_values, hs = h_values;
    std::sort(ns.begin(), ns.end());
    std::sort(hs.begin(), hs.end());

    std::filesystem::create_directories(options.out_dir);
    RunManifest manifest = start_manifest("fixation", loaded, options);

    std::vector<std::string> columns = {
        "N",         "h",          "gamma_h",   "N_c",        "trials",
        "decided",   "undecided",  "wins_0",    "fixation",   "std_error",
        "wilson_lo", "wilson_hi",  "predicted"};
    CsvWriter writer(options.out_dir / "fixation.csv", columns);

    std::uint64_t cell = 0;
    for (double n_raw : ns) {
      const int n = static_cast<int>(std::llround(n_raw));
      for (double h : hs) {
        SimConfig config = loaded.sim;
        config.population = n;
        config.channel.bias_h = h;
        config.stop = StopRule::threshold(u_star);
        config.horizon = static_cast<long>(std::llround(
            horizon_multiplier *
            consensus_time(u_star, 2, n, m, config.adaptation_rate)));
        config.probe_every = std::max<long>(1, config.horizon / 400);
        try {
          config.validate();
        } catch (const std::exception& e) {
          throw ConfigError(loaded.kv.source() + ": fixation cell N=" + std::to_string(n) +
                            ": " + e.what());
        }

        const EnsembleResult ensemble = run_ensemble(config, loaded.trials, options.workers,
                                                     false, cell << 32);
        ++cell;
        const CrossoverParams cross =
            crossover(n, m, config.adaptation_rate, h, config.channel.temperature.value_or(1.0));
        const long decided = ensemble.decided();
        const long wins = decided > 0 ? ensemble.winner_counts()[0] : 0;
        double estimate = std::numeric_limits<double>::quiet_NaN();
        double se = std::numeric_limits<double>::quiet_NaN();
        double wilson_lo = std::numeric_limits<double>::quiet_NaN();
        double wilson_hi = std::numeric_limits<double>::quiet_NaN();
        if (decided > 0) {
          const EstimateWithError est = fixation_estimate(ensemble, 0);
          estimate = est.value;
          se = est.std_error;
          std::tie(wilson_lo, wilson_hi) = wilson_interval(wins, decided);
        }
        writer.row(std::vector<std::string>{
            csv_number(static_cast<long>(n)), csv_number(h), csv_number(cross.gamma_h),
            csv_number(cross.n_c), csv_number(static_cast<long>(ensemble.trials.size())),
            csv_number(decided), csv_number(ensemble.undecided()), csv_number(wins),
            csv_number(estimate), csv_number(se), csv_number(wilson_lo),
            csv_number(wilson_hi), csv_number(fixation_probability(0.5, cross.gamma_h))});
      }
    }
    writer.close();

    manifest.finished_utc = utc_timestamp();
    manifest.add_output(options.out_dir / "fixation.csv");
    manifest.write(options.out_dir / "fixation.manifest.json");
  });
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Simplex gossip simulation laboratory"};
  app.require_subcommand(1);

  CliOptions options;
  std::uint64_t seed_value = 0;
  long trials_value = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", options.config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--out", options.out_dir, "output directory (default .)");
    auto* seed_opt = cmd->add_option("--seed", seed_value, "override the config seed");
    auto* trials_opt = cmd->add_option("--trials", trials_value, "override the trial count");
    cmd->add_option("--workers", options.workers,
                    "worker threads (default: QSG_WORKERS or hardware)");
    cmd->callback([&, seed_opt, trials_opt] {
      if (seed_opt->count()) options.seed_override = seed_value;
      if (trials_opt->count()) options.trials_override = trials_value;
    });
  };

  CLI::App* c_run = app.add_subcommand("run", "single trajectory to CSV");
  CLI::App* c_sweep = app.add_subcommand("sweep", "parameter sweep over N|m|T|h|alpha");
  CLI::App* c_drift = app.add_subcommand("drift-check", "measured vs predicted excess drift");
  CLI::App* c_fix = app.add_subcommand("fixation", "fixation grid over (N, h), K = 2");
  for (CLI::App* cmd : {c_run, c_sweep, c_drift, c_fix}) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (c_run->parsed()) return cmd_run(options);
  if (c_sweep->parsed()) return cmd_sweep(options);
  if (c_drift->parsed()) return cmd_drift_check(options);
  if (c_fix->parsed()) return cmd_fixation(options);
  return 1;
}

}  // namespace qsg
