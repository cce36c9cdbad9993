// Full system state: N agents on a shared K-label simplex plus the
// interaction-step counter.

#pragma once

#include <vector>

#include "qsg/simplex.hpp"

namespace qsg {

class PopulationState {
 public:
  // Validates N >= 2 and a shared label count across agents.
  explicit PopulationState(std::vector<SimplexVector> agents, long step_count = 0);

  static PopulationState symmetric(int population, int label_count);
  // Agents drawn i.i.d. Dirichlet(concentration * 1_K).
  static PopulationState dirichlet(int population, int label_count, double concentration,
                                   RandomSource& rng);

  int population() const { return static_cast<int>(agents_.size()); }
  int label_count() const { return agents_.front().label_count(); }
  long step_count() const { return step_count_; }

  const SimplexVector& agent(int i) const { return agents_[static_cast<std::size_t>(i)]; }
  const std::vector<SimplexVector>& agents() const { return agents_; }

  // Mutators used by the dynamics loop.
  SimplexVector& agent_mut(int i) { return agents_[static_cast<std::size_t>(i)]; }
  void bump_step() { ++step_count_; }

  bool operator==(const PopulationState&) const = default;

 private:
  std::vector<SimplexVector> agents_;
  long step_count_ = 0;
};

}  // namespace qsg
