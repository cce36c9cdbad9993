// Naming-drift interaction harness with pluggable agent policies.
//
// Interactions are ordered speaker-listener exchanges with delayed reveal:
// the listener produces its own response from its pre-step memory (logged,
// never fed to anyone), and only then records the speaker's labels. Probes
// sample agent outputs for measurement without mutating any state.
//
// Two synthetic policies are provided: a smoothed-frequency memory agent and
// a bridge that drives exact simplex-belief agents, which lets the harness
// be cross-checked against the dynamics module.

#pragma once

#include <functional>
#include <memory>
#include <string>

#include "qsg/dynamics.hpp"

namespace qsg {

// Reserved sentinel outside the label vocabulary; policies must ignore it.
inline constexpr Label kPadLabel = -1;

// Fixed-capacity observation buffer, oldest first, padded with kPadLabel.
class AgentMemory {
 public:
  explicit AgentMemory(int capacity);

  int capacity() const { return static_cast<int>(buffer_.size()); }
  std::span<const Label> entries() const { return buffer_; }
  int observed_count() const;  // non-PAD entries

  // Appends newest, evicting the oldest entry.
  void push(Label label);

  bool operator==(const AgentMemory&) const = default;

 private:
  std::vector<Label> buffer_;
};

// Behavior contract for harness agents. speak() must not mutate the agent;
// observe() receives the speaker's full per-interaction message.
class NndAgent {
 public:
  virtual ~NndAgent() = default;
  // Exactly `bandwidth` labels in [0, K).
  virtual std::vector<Label> speak(int bandwidth, RandomSource& rng) const = 0;
  virtual void observe(std::span<const Label> message) = 0;
  // The sampling law the agent would speak from right now.
  virtual SimplexVector distribution() const = 0;
  virtual std::unique_ptr<NndAgent> clone() const = 0;
};

// Memory agent speaking i.i.d. labels from the add-lambda smoothed frequency
// distribution of its memory: (count + lambda) / (observed + lambda K).
class FrequencyAgent : public NndAgent {
 public:
  FrequencyAgent(int label_count, int memory_capacity, double lambda = 1.0);

  std::vector<Label> speak(int bandwidth, RandomSource& rng) const override;
  void observe(std::span<const Label> message) override;
  SimplexVector distribution() const override;
  std::unique_ptr<NndAgent> clone() const override;

  const AgentMemory& memory() const { return memory_; }

 private:
  int label_count_;
  double lambda_;
  AgentMemory memory_;
};

// Bridge driving an exact simplex belief: speaks i.i.d. labels from the
// belief and, on observe, takes one adaptation step toward the one-hot
// (single label) or empirical (multi-label) message.
class SimplexBridgeAgent : public NndAgent {
 public:
  SimplexBridgeAgent(SimplexVector state, double alpha);

  std::vector<Label> speak(int bandwidth, RandomSource& rng) const override;
  void observe(std::span<const Label> message) override;
  SimplexVector distribution() const override;
  std::unique_ptr<NndAgent> clone() const override;

  const SimplexVector& state() const { return state_; }

 private:
  SimplexVector state_;
  double alpha_;
};

struct NndConfig {
  int population = 2;
  int label_count = 2;
  int bandwidth = 1;          // labels per message
  int memory_capacity = 10;
  std::string referent = "ref_00";
  long horizon = 1;
  long probe_every = 1;
  int probe_samples_per_agent = 1;
  StopRule stop = StopRule::none();  // threshold uses exact-state U
  std::uint64_t seed = 0;

  void validate() const;
};

using AgentFactory = std::function<std::unique_ptr<NndAgent>(int agent_index)>;

using NndPopulation = std::vector<std::unique_ptr<NndAgent>>;

struct NndStepLog {
  int speaker;
  int listener;
  std::vector<Label> message;            // pushed into the listener's memory
  std::vector<Label> listener_response;  // delayed-reveal response, discarded
};

// One delayed-reveal interaction; throws on out-of-vocabulary labels.
NndStepLog nnd_step(NndPopulation& population, const NndConfig& config, RandomSource& rng);

// Measurement-only probe: every agent speaks probe_samples_per_agent single
// labels; the pooled frequencies form the empirical population mean.
SimplexVector probe(const NndPopulation& population, const NndConfig& config,
                    RandomSource& rng);

struct NndProbeRow {
  long step;
  ObservableRecord exact;       // from agent distributions
  ObservableRecord estimated;   // from probe samples; V, q, S are NaN
};

struct NndTrajectory {
  std::vector<NndProbeRow> probes;
  TerminalInfo terminal;
};

// Full harness run; agents come from the factory. Stops on absorption of the
// exact distributions, on the exact-U threshold, or at the horizon.
NndTrajectory run_nnd(const NndConfig& config, const AgentFactory& factory,
                      std::uint64_t stream = 0);

// Deterministic synthetic display labels (5 lowercase characters per label).
std::vector<std::string> synthetic_labels(std::uint64_t seed, int label_count);

}  // namespace qsg
