#include "qsg/protocol.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace qsg {

namespace {

constexpr std::uint64_t kStepStreamTag = 0x73746570;
constexpr std::uint64_t kProbeStreamTag = 0x70726f62;

void check_labels(std::span<const Label> labels, int label_count) {
  for (Label l : labels) {
    if (l < 0 || l >= label_count)
      throw std::runtime_error("protocol violation: policy emitted label outside [0, K)");
  }
}

// Absorption of the exact distributions: all agents at one shared vertex.
std::optional<Label> nnd_absorption(const NndPopulation& population) {
  std::vector<SimplexVector> states;
  states.reserve(population.size());
  for (const auto& agent : population) states.push_back(agent->distribution());
  return detect_absorption(PopulationState(std::move(states)));
}

PopulationState exact_state(const NndPopulation& population) {
  std::vector<SimplexVector> states;
  states.reserve(population.size());
  for (const auto& agent : population) states.push_back(agent->distribution());
  return PopulationState(std::move(states));
}

}  // namespace

AgentMemory::AgentMemory(int capacity) {
  if (capacity < 1) throw std::invalid_argument("memory capacity must be >= 1");
  buffer_.assign(static_cast<std::size_t>(capacity), kPadLabel);
}

int AgentMemory::observed_count() const {
  return static_cast<int>(
      std::count_if(buffer_.begin(), buffer_.end(), [](Label l) { return l != kPadLabel; }));
}

void AgentMemory::push(Label label) {
  buffer_.erase(buffer_.begin());
  buffer_.push_back(label);
}

FrequencyAgent::FrequencyAgent(int label_count, int memory_capacity, double lambda)
    : label_count_(label_count), lambda_(lambda), memory_(memory_capacity) {
  if (label_count < 2) throw std::invalid_argument("label count must be >= 2");
  if (!(lambda > 0.0)) throw std::invalid_argument("smoothing lambda must be > 0");
}

SimplexVector FrequencyAgent::distribution() const {
  std::vector<double> w(static_cast<std::size_t>(label_count_), lambda_);
  for (Label l : memory_.entries()) {
    if (l != kPadLabel) w[static_cast<std::size_t>(l)] += 1.0;
  }
  const double total = memory_.observed_count() + lambda_ * label_count_;
  for (double& v : w) v /= total;
  return SimplexVector(std::move(w));
}

std::vector<Label> FrequencyAgent::speak(int bandwidth, RandomSource& rng) const {
  const SimplexVector dist = distribution();
  std::vector<Label> out(static_cast<std::size_t>(bandwidth));
  for (Label& l : out) l = sample_label(dist, rng);
  return out;
}

void FrequencyAgent::observe(std::span<const Label> message) {
  for (Label l : message) memory_.push(l);
}

std::unique_ptr<NndAgent> FrequencyAgent::clone() const {
  return std::make_unique<FrequencyAgent>(*this);
}

SimplexBridgeAgent::SimplexBridgeAgent(SimplexVector state, double alpha)
    : state_(std::move(state)), alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("adaptation rate must be in (0, 1]");
}

std::vector<Label> SimplexBridgeAgent::speak(int bandwidth, RandomSource& rng) const {
  std::vector<Label> out(static_cast<std::size_t>(bandwidth));
  for (Label& l : out) l = sample_label(state_, rng);
  return out;
}

void SimplexBridgeAgent::observe(std::span<const Label> message) {
  std::vector<double> target(static_cast<std::size_t>(state_.label_count()), 0.0);
  const double unit = 1.0 / static_cast<double>(message.size());
  for (Label l : message) target[static_cast<std::size_t>(l)] += unit;
  state_.mix_toward(target, alpha_);
}

SimplexVector SimplexBridgeAgent::distribution() const { return state_; }

std::unique_ptr<NndAgent> SimplexBridgeAgent::clone() const {
  return std::make_unique<SimplexBridgeAgent>(*this);
}

void NndConfig::validate() const {
  if (population < 2) throw std::invalid_argument("population: must be >= 2");
  if (label_count < 2) throw std::invalid_argument("label_count: must be >= 2");
  if (bandwidth < 1) throw std::invalid_argument("bandwidth: must be >= 1");
  if (memory_capacity < 1) throw std::invalid_argument("memory_capacity: must be >= 1");
  if (horizon < 1) throw std::invalid_argument("horizon: must be >= 1");
  if (probe_every < 1) throw std::invalid_argument("probe_every: must be >= 1");
  if (probe_samples_per_agent < 1)
    throw std::invalid_argument("probe_samples_per_agent: must be >= 1");
  if (stop.kind == StopKind::kThreshold &&
      !(stop.u_star > 1.0 / label_count && stop.u_star < 1.0))
    throw std::invalid_argument("u_star: must lie in (1/K, 1)");
}

NndStepLog nnd_step(NndPopulation& population, const NndConfig& config, RandomSource& rng) {
  const auto [speaker, listener] = select_pair(static_cast<int>(population.size()), rng);
  NndStepLog log;
  log.speaker = speaker;
  log.listener = listener;
  log.message = population[static_cast<std::size_t>(speaker)]->speak(config.bandwidth, rng);
  check_labels(log.message, config.label_count);
  // Delayed reveal: the listener answers from its pre-step state before the
  // speaker's labels enter its memory. The response never enters anyone's
  // memory; it is returned for logging only.
  log.listener_response =
      population[static_cast<std::size_t>(listener)]->speak(config.bandwidth, rng);
  check_labels(log.listener_response, config.label_count);
  population[static_cast<std::size_t>(listener)]->observe(log.message);
  return log;
}

SimplexVector probe(const NndPopulation& population, const NndConfig& config,
                    RandomSource& rng) {
  std::vector<double> counts(static_cast<std::size_t>(config.label_count), 0.0);
  long total = 0;
  for (const auto& agent : population) {
    for (int s = 0; s < config.probe_samples_per_agent; ++s) {
      const std::vector<Label> out = agent->speak(1, rng);
      check_labels(out, config.label_count);
      counts[static_cast<std::size_t>(out[0])] += 1.0;
      ++total;
    }
  }
  for (double& v : counts) v /= static_cast<double>(total);
  return SimplexVector(std::move(counts));
}

NndTrajectory run_nnd(const NndConfig& config, const AgentFactory& factory,
                      std::uint64_t stream) {
  config.validate();
  RandomSource trial_rng = RandomSource(config.seed).split(stream);
  RandomSource step_rng = trial_rng.split(kStepStreamTag);
  RandomSource probe_rng = trial_rng.split(kProbeStreamTag);

  NndPopulation population;
  population.reserve(static_cast<std::size_t>(config.population));
  for (int i = 0; i < config.population; ++i) population.push_back(factory(i));
  for (const auto& agent : population) {
    if (agent->distribution().label_count() != config.label_count)
      throw std::invalid_argument("agent label count does not match the config");
  }

  NndTrajectory traj;
  traj.terminal.reason = StopReason::kHorizon;
  auto record_probe = [&](long t) {
    ObservableRecord exact = ObservableRecord::from_state(exact_state(population));
    ObservableRecord estimated =
        ObservableRecord::from_mean(probe(population, config, probe_rng));
    traj.probes.push_back({t, std::move(exact), std::move(estimated)});
  };
  record_probe(0);

  const bool check_absorb = config.stop.kind == StopKind::kAbsorption;
  const bool check_threshold = config.stop.kind == StopKind::kThreshold;

  for (long t = 1; t <= config.horizon; ++t) {
    nnd_step(population, config, step_rng);

    if (check_absorb) {
      if (auto winner = nnd_absorption(population)) {
        record_probe(t);
        traj.terminal = {StopReason::kAbsorbed, winner, t};
        return traj;
      }
    }

    const bool probe_now = (t % config.probe_every == 0) || t == config.horizon;
    if (!probe_now) continue;
    record_probe(t);

    if (check_threshold &&
        traj.probes.back().exact.polarization >= config.stop.u_star) {
      const SimplexVector& m = traj.probes.back().exact.mean;
      std::optional<Label> winner;
      if (m[m.argmax()] > 1.0 / config.label_count) winner = m.argmax();
      traj.terminal = {StopReason::kThreshold, winner, t};
      return traj;
    }
  }
  return traj;
}

std::vector<std::string> synthetic_labels(std::uint64_t seed, int label_count) {
  RandomSource rng(seed, 0x6c6162656c);
  std::vector<std::string> labels;
  std::unordered_set<std::string> seen;
  while (static_cast<int>(labels.size()) < label_count) {
    std::string s(5, 'a');
    for (char& c : s) c = static_cast<char>('a' + rng.next_below(26));
    if (seen.insert(s).second) labels.push_back(std::move(s));
  }
  return labels;
}

}  // namespace qsg
