// The gossip Markov process: uniform ordered-pair scheduling, single
// interaction steps, full probed trajectories, seeded ensembles, and
// absorption detection.

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qsg/channel.hpp"
#include "qsg/observables.hpp"
#include "qsg/population.hpp"

namespace qsg {

enum class InitKind { kSymmetric, kDirichlet, kExplicit };

struct InitSpec {
  InitKind kind = InitKind::kSymmetric;
  double concentration = 1.0;          // Dirichlet only
  std::vector<SimplexVector> states;   // explicit only

  static InitSpec symmetric() { return {}; }
  static InitSpec dirichlet(double concentration) {
    return {InitKind::kDirichlet, concentration, {}};
  }
  static InitSpec explicit_states(std::vector<SimplexVector> states) {
    return {InitKind::kExplicit, 1.0, std::move(states)};
  }
};

enum class StopKind { kNone, kThreshold, kAbsorption };

struct StopRule {
  StopKind kind = StopKind::kNone;
  double u_star = 0.9;  // threshold mode only; must lie in (1/K, 1)

  static StopRule none() { return {}; }
  static StopRule threshold(double u_star) { return {StopKind::kThreshold, u_star}; }
  static StopRule absorption() { return {StopKind::kAbsorption, 0.9}; }
};

struct SimConfig {
  int population = 2;
  int label_count = 2;
  double adaptation_rate = 1.0;
  ChannelSpec channel = ChannelSpec::hard();
  InitSpec init = InitSpec::symmetric();
  long horizon = 1;       // max interaction steps, >= 1
  long probe_every = 1;   // steps between observable records, >= 1
  StopRule stop = StopRule::none();
  std::uint64_t seed = 0;

  void validate() const;  // throws invalid_argument naming the offending field
};

enum class StopReason { kHorizon, kThreshold, kAbsorbed };

struct ProbeRow {
  long step;
  ObservableRecord record;
};

struct TerminalInfo {
  StopReason reason = StopReason::kHorizon;
  std::optional<Label> winner;          // absent for undecided runs
  std::optional<long> consensus_step;   // absent iff reason == kHorizon
};

struct Trajectory {
  std::vector<ProbeRow> probes;  // strictly increasing steps; includes 0 and terminal
  TerminalInfo terminal;
};

struct TrialSummary {
  StopReason reason;
  std::optional<Label> winner;
  std::optional<long> consensus_step;
  long final_step;
  double final_polarization;
};

struct EnsembleResult {
  int label_count = 0;
  std::vector<TrialSummary> trials;
  std::vector<Trajectory> trajectories;  // kept only when requested

  std::vector<long> winner_counts() const;   // per-label tally over decided trials
  std::vector<long> consensus_steps() const;
  long decided() const;
  long undecided() const;
};

// Uniform ordered (speaker, listener) pair with speaker != listener;
// consumes exactly one rng event.
std::pair<int, int> select_pair(int population, RandomSource& rng);

// One interaction: exactly the listener changes, step count increments.
PopulationState step(const PopulationState& state, double alpha, const ChannelSpec& channel,
                     RandomSource& rng);

// Consensus label if every agent equals the same vertex within 1e-12.
std::optional<Label> detect_absorption(const PopulationState& state);

// Initial state per config; Dirichlet draws come from `rng`.
PopulationState make_initial_state(const SimConfig& config, RandomSource& rng);

// Full trajectory for one trial. `stream` selects an independent rng stream
// of the config seed, so ensembles index trials by stream.
Trajectory run(const SimConfig& config, std::uint64_t stream = 0);

// Advances a fresh trial exactly `target_step` interactions and returns the
// state; used to capture snapshot states for drift measurements.
PopulationState run_to_step(const SimConfig& config, long target_step,
                            std::uint64_t stream = 0);

// Independent trials on derived streams; results do not depend on worker
// scheduling. Trajectories are retained only when keep_trajectories is set.
// `stream_base` offsets the per-trial streams so disjoint ensembles sharing
// one master seed stay uncorrelated.
EnsembleResult run_ensemble(const SimConfig& config, long trials, unsigned workers = 0,
                            bool keep_trajectories = false, std::uint64_t stream_base = 0);

}  // namespace qsg
