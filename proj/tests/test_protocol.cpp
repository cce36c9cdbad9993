#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "qsg/protocol.hpp"
#include "qsg/stats.hpp"

using namespace qsg;

namespace {

NndConfig basic_config(int n, int k, int m, int h_cap) {
  NndConfig config;
  config.population = n;
  config.label_count = k;
  config.bandwidth = m;
  config.memory_capacity = h_cap;
  config.horizon = 100;
  config.probe_every = 10;
  config.probe_samples_per_agent = 1;
  config.seed = 11;
  return config;
}

// Seeds the rng so that the first pair draw of nnd_step picks (0, 1).
RandomSource rng_with_first_pair(int population, int speaker, int listener) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    RandomSource candidate(seed);
    RandomSource probe = candidate;
    if (select_pair(population, probe) == std::pair<int, int>{speaker, listener})
      return candidate;
  }
  throw std::logic_error("no seed found for the requested pair");
}

struct OutOfVocabAgent : NndAgent {
  int k;
  explicit OutOfVocabAgent(int label_count) : k(label_count) {}
  std::vector<Label> speak(int bandwidth, RandomSource&) const override {
    return std::vector<Label>(static_cast<std::size_t>(bandwidth), static_cast<Label>(k));
  }
  void observe(std::span<const Label>) override {}
  SimplexVector distribution() const override { return uniform_vector(k); }
  std::unique_ptr<NndAgent> clone() const override {
    return std::make_unique<OutOfVocabAgent>(*this);
  }
};

}  // namespace

TEST_CASE("agent memory is a fixed-length ring padded with the sentinel") {
  AgentMemory memory(3);
  CHECK(memory.capacity() == 3);
  CHECK(memory.observed_count() == 0);
  for (Label l : memory.entries()) CHECK(l == kPadLabel);

  memory.push(4);
  memory.push(9);
  CHECK(memory.entries()[0] == kPadLabel);
  CHECK(memory.entries()[1] == 4);
  CHECK(memory.entries()[2] == 9);
  CHECK(memory.observed_count() == 2);

  memory.push(1);
  memory.push(1);
  CHECK(memory.capacity() == 3);
  CHECK(memory.entries()[0] == 9);
  CHECK(memory.entries()[1] == 1);
  CHECK(memory.entries()[2] == 1);
  CHECK_THROWS_AS(AgentMemory(0), std::invalid_argument);
}

TEST_CASE("frequency agent: smoothing arithmetic") {
  FrequencyAgent empty(3, 10);
  const SimplexVector uniform = empty.distribution();
  for (int k = 0; k < 3; ++k)
    CHECK(uniform[k] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  FrequencyAgent full(3, 10);
  for (int i = 0; i < 10; ++i) {
    const Label a = 1;
    full.observe(std::span<const Label>(&a, 1));
  }
  const SimplexVector dist = full.distribution();
  CHECK(dist[1] == doctest::Approx(11.0 / 13.0).epsilon(1e-12));
  CHECK(dist[0] == doctest::Approx(1.0 / 13.0).epsilon(1e-12));
  CHECK(dist[2] == doctest::Approx(1.0 / 13.0).epsilon(1e-12));

  RandomSource rng(5);
  for (int i = 0; i < 2000; ++i) {
    for (Label l : full.speak(3, rng)) {
      CHECK(l >= 0);
      CHECK(l < 3);
    }
  }
}

TEST_CASE("probe: empty memories with the frequency policy sample uniformly") {
  NndConfig config = basic_config(10, 4, 1, 8);
  config.probe_samples_per_agent = 1000;  // 10^4 samples total
  NndPopulation population;
  for (int i = 0; i < config.population; ++i)
    population.push_back(std::make_unique<FrequencyAgent>(4, 8));
  RandomSource rng(77);
  const SimplexVector mean = probe(population, config, rng);
  const long total = 10000;
  for (int k = 0; k < 4; ++k) {
    const double band = 3.0 * std::sqrt(0.25 * 0.75 / total);
    CHECK(std::abs(mean[k] - 0.25) <= band);
  }
}

TEST_CASE("probe: vertex-state bridges probe to the exact vertex") {
  NndConfig config = basic_config(6, 3, 1, 5);
  config.probe_samples_per_agent = 50;
  NndPopulation population;
  for (int i = 0; i < config.population; ++i)
    population.push_back(std::make_unique<SimplexBridgeAgent>(vertex(3, 2), 1.0));
  RandomSource rng(3);
  const SimplexVector mean = probe(population, config, rng);
  CHECK(mean == vertex(3, 2));
}

TEST_CASE("probe never mutates agent state, over randomized populations") {
  RandomSource seeder(404);
  for (int check = 0; check < 1000; ++check) {
    NndConfig config = basic_config(4, 3, 1, 4);
    config.probe_samples_per_agent = 3;
    NndPopulation population;
    for (int i = 0; i < 4; ++i) {
      if (seeder.next_unit() < 0.5) {
        auto agent = std::make_unique<FrequencyAgent>(3, 4);
        for (int p = 0; p < static_cast<int>(seeder.next_below(5)); ++p) {
          const Label l = static_cast<Label>(seeder.next_below(3));
          agent->observe(std::span<const Label>(&l, 1));
        }
        population.push_back(std::move(agent));
      } else {
        population.push_back(std::make_unique<SimplexBridgeAgent>(
            PopulationState::dirichlet(2, 3, 1.0, seeder).agent(0), 0.5));
      }
    }
    std::vector<SimplexVector> before;
    for (const auto& agent : population) before.push_back(agent->distribution());
    RandomSource rng(check);
    probe(population, config, rng);
    for (int i = 0; i < 4; ++i) REQUIRE(population[static_cast<std::size_t>(i)]->distribution() == before[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("nnd_step: ring push semantics and speaker immutability") {
  NndConfig config = basic_config(2, 3, 1, 3);
  // Listener memory [PAD, a=0, b=1]; speaker pinned at vertex 2 so the
  // message is deterministically [c=2].
  auto listener = std::make_unique<FrequencyAgent>(3, 3);
  const Label a = 0, b = 1;
  listener->observe(std::span<const Label>(&a, 1));
  listener->observe(std::span<const Label>(&b, 1));
  NndPopulation population;
  population.push_back(std::make_unique<SimplexBridgeAgent>(vertex(3, 2), 1.0));
  population.push_back(std::move(listener));

  const SimplexVector speaker_before = population[0]->distribution();
  RandomSource rng = rng_with_first_pair(2, 0, 1);
  const NndStepLog log = nnd_step(population, config, rng);
  CHECK(log.speaker == 0);
  CHECK(log.listener == 1);
  REQUIRE(log.message == std::vector<Label>{2});

  const auto& memory = dynamic_cast<const FrequencyAgent&>(*population[1]).memory();
  CHECK(memory.entries()[0] == 0);
  CHECK(memory.entries()[1] == 1);
  CHECK(memory.entries()[2] == 2);
  CHECK(population[0]->distribution() == speaker_before);
}

TEST_CASE("nnd_step: repeated labels are all pushed in emission order") {
  NndConfig config = basic_config(2, 3, 2, 5);
  NndPopulation population;
  population.push_back(std::make_unique<SimplexBridgeAgent>(vertex(3, 1), 1.0));
  population.push_back(std::make_unique<FrequencyAgent>(3, 5));

  RandomSource rng = rng_with_first_pair(2, 0, 1);
  const NndStepLog log = nnd_step(population, config, rng);
  REQUIRE(log.message == std::vector<Label>{1, 1});
  const auto& memory = dynamic_cast<const FrequencyAgent&>(*population[1]).memory();
  CHECK(memory.entries()[3] == 1);
  CHECK(memory.entries()[4] == 1);
  CHECK(memory.observed_count() == 2);
}

TEST_CASE("nnd_step: out-of-vocabulary speech is a protocol violation") {
  NndConfig config = basic_config(2, 3, 1, 3);
  NndPopulation population;
  population.push_back(std::make_unique<OutOfVocabAgent>(3));
  population.push_back(std::make_unique<FrequencyAgent>(3, 3));
  RandomSource rng(1);
  CHECK_THROWS_AS(nnd_step(population, config, rng), std::runtime_error);
}

TEST_CASE("delayed reveal: the response comes from the pre-step memory") {
  NndConfig config = basic_config(5, 3, 2, 6);
  RandomSource seeder(9);
  NndPopulation population;
  for (int i = 0; i < 5; ++i) {
    auto agent = std::make_unique<FrequencyAgent>(3, 6);
    for (int p = 0; p < 4; ++p) {
      const Label l = static_cast<Label>(seeder.next_below(3));
      agent->observe(std::span<const Label>(&l, 1));
    }
    population.push_back(std::move(agent));
  }

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    // Clone everything, replay the event sequence by hand, and require the
    // recomputed response to match the harness log exactly.
    NndPopulation clones;
    for (const auto& agent : population) clones.push_back(agent->clone());
    RandomSource rng(seed), replay(seed);

    const NndStepLog log = nnd_step(population, config, rng);

    const auto pair = select_pair(5, replay);
    const auto msg = clones[static_cast<std::size_t>(pair.first)]->speak(2, replay);
    const auto response = clones[static_cast<std::size_t>(pair.second)]->speak(2, replay);
    REQUIRE(pair.first == log.speaker);
    REQUIRE(msg == log.message);
    REQUIRE(response == log.listener_response);

    // Keep populations in sync for the next iteration.
    clones[static_cast<std::size_t>(pair.second)]->observe(msg);
    REQUIRE(clones[static_cast<std::size_t>(pair.second)]->distribution() ==
            population[static_cast<std::size_t>(pair.second)]->distribution());
    population = std::move(clones);
  }
}

TEST_CASE("memory length is invariant under harness operations") {
  NndConfig config = basic_config(4, 3, 3, 7);
  NndPopulation population;
  for (int i = 0; i < 4; ++i) population.push_back(std::make_unique<FrequencyAgent>(3, 7));
  RandomSource rng(31);
  for (int t = 0; t < 200; ++t) {
    nnd_step(population, config, rng);
    for (const auto& agent : population) {
      const auto& mem = dynamic_cast<const FrequencyAgent&>(*agent).memory();
      REQUIRE(mem.capacity() == 7);
      REQUIRE(mem.entries().size() == 7);
    }
  }
}

TEST_CASE("bridge: one-hot states speak a single label and absorb under copying") {
  RandomSource rng(2);
  SimplexBridgeAgent pinned(vertex(4, 3), 1.0);
  for (int i = 0; i < 50; ++i) {
    const auto labels = pinned.speak(6, rng);
    for (Label l : labels) REQUIRE(l == 3);
  }

  // Pure-copy bridge populations absorb, and the winner is near-uniform.
  NndConfig config = basic_config(6, 2, 1, 1);
  config.horizon = 100000;
  config.stop = StopRule::absorption();
  const auto factory = [](int) {
    return std::make_unique<SimplexBridgeAgent>(uniform_vector(2), 1.0);
  };
  long absorbed = 0, zero_wins = 0;
  const long trials = 2000;
  for (long t = 0; t < trials; ++t) {
    config.seed = 600;
    const NndTrajectory traj = run_nnd(config, factory, static_cast<std::uint64_t>(t));
    if (traj.terminal.reason == StopReason::kAbsorbed) {
      ++absorbed;
      zero_wins += traj.terminal.winner == Label{0};
    }
  }
  CHECK(absorbed == trials);
  const double share = static_cast<double>(zero_wins) / trials;
  CHECK(std::abs(share - 0.5) <= 3.0 * std::sqrt(0.25 / trials));
}

TEST_CASE("bridge ensembles reproduce the exact dynamics distributionally") {
  // Matched configs: Hard channel, K=3, N=8, alpha=0.5. Compare mean exact
  // U at shared probe times across 200 trials of each harness.
  const int n = 8, k = 3;
  const double alpha = 0.5;
  const long horizon = 600, probe_every = 60, trials = 200;

  SimConfig sim;
  sim.population = n;
  sim.label_count = k;
  sim.adaptation_rate = alpha;
  sim.channel = ChannelSpec::hard();
  sim.horizon = horizon;
  sim.probe_every = probe_every;
  sim.seed = 404;

  NndConfig nnd = basic_config(n, k, 1, 1);
  nnd.horizon = horizon;
  nnd.probe_every = probe_every;
  nnd.seed = 505;

  const std::size_t probes = static_cast<std::size_t>(horizon / probe_every) + 1;
  std::vector<MomentAccumulator> sim_u(probes), nnd_u(probes);

  const EnsembleResult sim_runs = run_ensemble(sim, trials, 0, true);
  for (const auto& traj : sim_runs.trajectories) {
    REQUIRE(traj.probes.size() == probes);
    for (std::size_t p = 0; p < probes; ++p)
      sim_u[p].add(traj.probes[p].record.polarization);
  }
  const auto factory = [&](int) {
    return std::make_unique<SimplexBridgeAgent>(uniform_vector(k), alpha);
  };
  for (long t = 0; t < trials; ++t) {
    const NndTrajectory traj = run_nnd(nnd, factory, static_cast<std::uint64_t>(t));
    REQUIRE(traj.probes.size() == probes);
    for (std::size_t p = 0; p < probes; ++p) nnd_u[p].add(traj.probes[p].exact.polarization);
  }
  for (std::size_t p = 1; p < probes; ++p) {
    const double gap = std::abs(sim_u[p].mean() - nnd_u[p].mean());
    const double se = std::sqrt(sim_u[p].std_error() * sim_u[p].std_error() +
                                nnd_u[p].std_error() * nnd_u[p].std_error());
    CHECK(gap <= 3.0 * se);
  }
}

TEST_CASE("run_nnd: probes carry exact and estimated records") {
  NndConfig config = basic_config(5, 3, 1, 6);
  config.horizon = 40;
  config.probe_every = 10;
  config.probe_samples_per_agent = 20;
  const NndTrajectory traj = run_nnd(config, [](int) {
    return std::make_unique<FrequencyAgent>(3, 6);
  });
  REQUIRE(traj.probes.size() == 5);
  CHECK(traj.probes.front().step == 0);
  CHECK(traj.probes.back().step == 40);
  for (const auto& row : traj.probes) {
    CHECK(std::isfinite(row.exact.disagreement));
    CHECK(std::isnan(row.estimated.disagreement));  // probe rows are mean-only
    CHECK(row.estimated.polarization >= 1.0 / 3.0 - 1e-9);
  }
  CHECK(traj.terminal.reason == StopReason::kHorizon);
}

TEST_CASE("synthetic display labels are deterministic and distinct") {
  const auto labels = synthetic_labels(99, 12);
  CHECK(labels == synthetic_labels(99, 12));
  std::set<std::string> unique(labels.begin(), labels.end());
  CHECK(unique.size() == 12);
  for (const auto& label : labels) {
    CHECK(label.size() == 5);
    for (char c : label) {
      CHECK(c >= 'a');
      CHECK(c <= 'z');
    }
  }
  CHECK(synthetic_labels(99, 12) != synthetic_labels(100, 12));
}
