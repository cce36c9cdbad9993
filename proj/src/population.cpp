#include "qsg/population.hpp"

#include <stdexcept>

namespace qsg {

PopulationState::PopulationState(std::vector<SimplexVector> agents, long step_count)
    : agents_(std::move(agents)), step_count_(step_count) {
  if (agents_.size() < 2) throw std::invalid_argument("population needs at least 2 agents");
  const int k = agents_.front().label_count();
  for (const auto& a : agents_) {
    if (a.label_count() != k)
      throw std::invalid_argument("all agents must share one label count");
  }
  if (step_count_ < 0) throw std::invalid_argument("step count must be >= 0");
}

PopulationState PopulationState::symmetric(int population, int label_count) {
  std::vector<SimplexVector> agents(static_cast<std::size_t>(population),
                                    uniform_vector(label_count));
  return PopulationState(std::move(agents));
}

PopulationState PopulationState::dirichlet(int population, int label_count,
                                           double concentration, RandomSource& rng) {
  if (!(concentration > 0.0)) throw std::domain_error("dirichlet concentration must be > 0");
  std::vector<SimplexVector> agents;
  agents.reserve(static_cast<std::size_t>(population));
  for (int i = 0; i < population; ++i) {
    std::vector<double> w(static_cast<std::size_t>(label_count));
    double sum = 0.0;
    for (double& v : w) {
      v = rng.next_gamma(concentration);
      sum += v;
    }
    for (double& v : w) v /= sum;
    agents.emplace_back(std::move(w));
  }
  return PopulationState(std::move(agents));
}

}  // namespace qsg
