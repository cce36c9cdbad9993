#include "qsg/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "qsg/parallel.hpp"

namespace qsg {

namespace {

constexpr std::uint64_t kInitStreamTag = 0x696e6974;  // init draws
constexpr std::uint64_t kStepStreamTag = 0x73746570;  // interaction draws

// One interaction, in place. The message is built in scratch, so the loop
// makes no allocations after warmup.
void advance(PopulationState& state, double alpha, const ChannelSpec& channel,
             RandomSource& rng, detail::EmitScratch& scratch) {
  const auto [speaker, listener] = select_pair(state.population(), rng);
  const auto message = detail::emit_raw(state.agent(speaker).weights(), channel, rng, scratch);
  state.agent_mut(listener).mix_toward(message, alpha);
  state.bump_step();
}

std::optional<Label> winner_from_mean(const SimplexVector& mean_vec) {
  const Label best = mean_vec.argmax();
  if (mean_vec[best] <= 1.0 / mean_vec.label_count()) return std::nullopt;  // exact tie
  return best;
}

}  // namespace

void SimConfig::validate() const {
  if (population < 2) throw std::invalid_argument("population: must be >= 2");
  if (label_count < 2) throw std::invalid_argument("label_count: must be >= 2");
  if (!(adaptation_rate > 0.0 && adaptation_rate <= 1.0))
    throw std::invalid_argument("adaptation_rate: must be in (0, 1]");
  validate_channel(channel, label_count);
  if (horizon < 1) throw std::invalid_argument("horizon: must be >= 1");
  if (probe_every < 1) throw std::invalid_argument("probe_every: must be >= 1");
  if (stop.kind == StopKind::kThreshold) {
    if (!(stop.u_star > 1.0 / label_count && stop.u_star < 1.0))
      throw std::invalid_argument("u_star: must lie in (1/K, 1)");
  }
  if (init.kind == InitKind::kDirichlet && !(init.concentration > 0.0))
    throw std::invalid_argument("dirichlet_concentration: must be > 0");
  if (init.kind == InitKind::kExplicit) {
    if (static_cast<int>(init.states.size()) != population)
      throw std::invalid_argument("explicit_states: need exactly one state per agent");
    for (const auto& s : init.states) {
      if (s.label_count() != label_count)
        throw std::invalid_argument("explicit_states: label count mismatch");
    }
  }
}

std::pair<int, int> select_pair(int population, RandomSource& rng) {
  if (population < 2) throw std::invalid_argument("pair selection needs population >= 2");
  const std::uint64_t n = static_cast<std::uint64_t>(population);
  const std::uint64_t idx = rng.next_below(n * (n - 1));
  const int speaker = static_cast<int>(idx / (n - 1));
  const int offset = static_cast<int>(idx % (n - 1));
  const int listener = offset + (offset >= speaker ? 1 : 0);
  return {speaker, listener};
}

PopulationState step(const PopulationState& state, double alpha, const ChannelSpec& channel,
                     RandomSource& rng) {
  validate_channel(channel, state.label_count());
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("adaptation rate must be in (0, 1]");
  PopulationState next = state;
  detail::EmitScratch scratch;
  scratch.resize(static_cast<std::size_t>(state.label_count()));
  advance(next, alpha, channel, rng, scratch);
  return next;
}

std::optional<Label> detect_absorption(const PopulationState& state) {
  const SimplexVector& first = state.agent(0);
  if (!first.is_vertex()) return std::nullopt;
  const Label k = first.argmax();
  for (int i = 0; i < state.population(); ++i) {
    auto w = state.agent(i).weights();
    for (int c = 0; c < state.label_count(); ++c) {
      const double target = (c == k) ? 1.0 : 0.0;
      if (std::abs(w[static_cast<std::size_t>(c)] - target) > kVertexTolerance)
        return std::nullopt;
    }
  }
  return k;
}

PopulationState make_initial_state(const SimConfig& config, RandomSource& rng) {
  switch (config.init.kind) {
    case InitKind::kSymmetric:
      return PopulationState::symmetric(config.population, config.label_count);
    case InitKind::kDirichlet:
      return PopulationState::dirichlet(config.population, config.label_count,
                                        config.init.concentration, rng);
    case InitKind::kExplicit:
      return PopulationState(config.init.states);
  }
  throw std::logic_error("unreachable init kind");
}

Trajectory run(const SimConfig& config, std::uint64_t stream) {
  config.validate();
  RandomSource trial_rng = RandomSource(config.seed).split(stream);
  RandomSource init_rng = trial_rng.split(kInitStreamTag);
  RandomSource step_rng = trial_rng.split(kStepStreamTag);

  PopulationState state = make_initial_state(config, init_rng);
  detail::EmitScratch scratch;
  scratch.resize(static_cast<std::size_t>(config.label_count));

  Trajectory traj;
  traj.probes.push_back({0, ObservableRecord::from_state(state)});
  traj.terminal.reason = StopReason::kHorizon;

  const bool check_absorption = config.stop.kind == StopKind::kAbsorption;
  const bool check_threshold = config.stop.kind == StopKind::kThreshold;

  for (long t = 1; t <= config.horizon; ++t) {
    advance(state, config.adaptation_rate, config.channel, step_rng, scratch);

    if (check_absorption) {
      if (auto winner = detect_absorption(state)) {
        traj.probes.push_back({t, ObservableRecord::from_state(state)});
        traj.terminal = {StopReason::kAbsorbed, winner, t};
        return traj;
      }
    }

    const bool probe_now = (t % config.probe_every == 0) || t == config.horizon;
    if (!probe_now) continue;

    ObservableRecord record = ObservableRecord::from_state(state);
    const double u = record.polarization;
    traj.probes.push_back({t, std::move(record)});

    if (check_threshold && u >= config.stop.u_star) {
      traj.terminal = {StopReason::kThreshold,
                       winner_from_mean(traj.probes.back().record.mean), t};
      return traj;
    }
  }
  return traj;
}

PopulationState run_to_step(const SimConfig& config, long target_step, std::uint64_t stream) {
  config.validate();
  if (target_step < 0) throw std::invalid_argument("target_step: must be >= 0");
  RandomSource trial_rng = RandomSource(config.seed).split(stream);
  RandomSource init_rng = trial_rng.split(kInitStreamTag);
  RandomSource step_rng = trial_rng.split(kStepStreamTag);
  PopulationState state = make_initial_state(config, init_rng);
  detail::EmitScratch scratch;
  scratch.resize(static_cast<std::size_t>(config.label_count));
  for (long t = 0; t < target_step; ++t)
    advance(state, config.adaptation_rate, config.channel, step_rng, scratch);
  return state;
}

EnsembleResult run_ensemble(const SimConfig& config, long trials, unsigned workers,
                            bool keep_trajectories, std::uint64_t stream_base) {
  if (trials < 1) throw std::invalid_argument("trials: must be >= 1");
  config.validate();
  EnsembleResult result;
  result.label_count = config.label_count;
  result.trials.resize(static_cast<std::size_t>(trials));
  if (keep_trajectories) result.trajectories.resize(static_cast<std::size_t>(trials));

  parallel_for(static_cast<std::size_t>(trials), workers, [&](std::size_t i) {
    Trajectory traj = run(config, stream_base + static_cast<std::uint64_t>(i));
    const ProbeRow& last = traj.probes.back();
    result.trials[i] = {traj.terminal.reason, traj.terminal.winner,
                        traj.terminal.consensus_step, last.step,
                        last.record.polarization};
    if (keep_trajectories) result.trajectories[i] = std::move(traj);
  });
  return result;
}

std::vector<long> EnsembleResult::winner_counts() const {
  std::vector<long> counts(static_cast<std::size_t>(label_count), 0);
  for (const auto& t : trials) {
    if (t.winner) ++counts[static_cast<std::size_t>(*t.winner)];
  }
  return counts;
}

std::vector<long> EnsembleResult::consensus_steps() const {
  std::vector<long> steps;
  for (const auto& t : trials) {
    if (t.consensus_step) steps.push_back(*t.consensus_step);
  }
  return steps;
}

long EnsembleResult::decided() const {
  long n = 0;
  for (const auto& t : trials) n += t.winner.has_value();
  return n;
}

long EnsembleResult::undecided() const {
  return static_cast<long>(trials.size()) - decided();
}

}  // namespace qsg
